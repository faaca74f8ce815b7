//
// Copyright 2026 The dpsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Feed-forward classifier with exact per-example gradients. Parameters live
// in one flat vector: for each layer, the row-major (output x input) weight
// matrix followed by the bias vector.

#ifndef DPSYNTH_MLP_H_
#define DPSYNTH_MLP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {

enum class Activation { kRelu, kIdentity };

struct LayerSpec {
  int input_dim = 0;
  int output_dim = 0;
  Activation activation = Activation::kIdentity;

  std::size_t num_parameters() const {
    return static_cast<std::size_t>(output_dim) * (input_dim + 1);
  }
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Hidden relu layers of the given widths followed by an identity output layer.
std::vector<LayerSpec> MakeArchitecture(int input_dim, std::span<const int> hidden,
                                        int class_count);

using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;

class MlpModel {
 public:
  static absl::StatusOr<MlpModel> Create(std::vector<LayerSpec> layers,
                                         Eigen::VectorXd parameters);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  static absl::StatusOr<MlpModel> Initialize(std::vector<LayerSpec> layers,
                                             std::uint64_t seed);

  const std::vector<LayerSpec>& layers() const { return layers_; }
  int input_dim() const { return layers_.front().input_dim; }
  int class_count() const { return layers_.back().output_dim; }
  std::size_t num_parameters() const { return static_cast<std::size_t>(parameters_.size()); }

  const Eigen::VectorXd& parameters() const { return parameters_; }
  // Callers must keep the vector size unchanged.
  Eigen::VectorXd& mutable_parameters() { return parameters_; }

  ConstRowMap weight(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const;

  bool AllFinite() const { return parameters_.allFinite(); }

 private:
  MlpModel(std::vector<LayerSpec> layers, Eigen::VectorXd parameters);

  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  Eigen::VectorXd parameters_;
};

struct PerExampleGradient {
  Eigen::VectorXd values;  // same layout as MlpModel::parameters()
};

absl::StatusOr<Eigen::VectorXd> Forward(const MlpModel& model,
                                        const Eigen::Ref<const Eigen::VectorXd>& x);
// Logits for every row of `x`.
absl::StatusOr<RowMatrix> ForwardBatch(const MlpModel& model, const RowMatrix& x);

// Softmax cross-entropy in log-sum-exp form.
absl::StatusOr<double> CrossEntropyLoss(const Eigen::Ref<const Eigen::VectorXd>& logits,
                                        int label);
Eigen::VectorXd Softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);

absl::StatusOr<PerExampleGradient> ComputePerExampleGradient(
    const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, int label);

// Per-example gradients for a batch, one row per example. `losses`, when
// non-null, receives each example's loss.
absl::StatusOr<RowMatrix> PerExampleGradients(const MlpModel& model,
                                              const RowMatrix& x,
                                              std::span<const int> labels,
                                              std::vector<double>* losses = nullptr);

// Mean gradient over the rows of `x` without materializing per-example
// gradients. `mean_loss`, when non-null, receives the mean loss.
absl::StatusOr<Eigen::VectorXd> MeanGradient(const MlpModel& model, const RowMatrix& x,
                                             std::span<const int> labels,
                                             double* mean_loss = nullptr);

// Argmax of logits, ties to the lowest class index.
int ArgMax(const Eigen::Ref<const Eigen::VectorXd>& logits);
absl::StatusOr<int> Predict(const MlpModel& model,
                            const Eigen::Ref<const Eigen::VectorXd>& x);
absl::StatusOr<std::vector<int>> PredictBatch(const MlpModel& model, const RowMatrix& x);

}  // namespace dpsynth

#endif  // DPSYNTH_MLP_H_
