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

// DP-SGD training of the labelling model: hyperparameter selection, clipping
// bound calibration, noise calibration through the accountant, and the
// clip / noise / update loop.

#ifndef DPSYNTH_DPSGD_TRAINER_H_
#define DPSYNTH_DPSGD_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/mlp.h"
#include "dpsynth/privacy_accountant.h"
#include "dpsynth/rng.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {

// Recorded in provenance: one Gaussian draw N(0, z^2 C^2 I) is added to the
// sum of clipped gradients per step, and batches are Poisson samples.
inline constexpr char kNoisePlacement[] = "single-draw-on-clipped-sum";
inline constexpr char kBatchSampling[] = "poisson";

struct DpSgdConfig {
  std::int64_t num_examples = 0;  // N
  std::int64_t batch_size = 256;  // b, expected Poisson batch size
  int epochs = 20;                // E
  double learning_rate = 0.5;     // eta
  double clip_norm = 1.0;         // C
  double noise_multiplier = 1.0;  // z
  std::uint64_t seed = 0;
  std::vector<int> hidden_layers = {64, 64};

  absl::Status Validate() const;
  // E * ceil(N / b) nominal steps.
  std::int64_t steps() const;
  friend bool operator==(const DpSgdConfig&, const DpSgdConfig&) = default;
};

struct TrainingStats {
  std::int64_t steps = 0;
  std::int64_t empty_batches = 0;
  std::int64_t examples_seen = 0;
  double final_batch_loss = 0.0;
  double max_clipped_norm = 0.0;
};

struct TrainedModel {
  MlpModel model;
  EncodingMap encoding;
  DpSgdConfig config;
  PrivacyBudget budget;
  // Accountant epsilon for `config` at budget.delta.
  double epsilon_spent = 0.0;
  // NaN when no validation split was supplied.
  double validation_accuracy = 0.0;
  TrainingStats stats;
};

// Includes each example independently with probability b / N.
class PoissonBatchSampler {
 public:
  PoissonBatchSampler(std::int64_t num_examples, std::int64_t batch_size,
                      std::uint64_t seed);
  std::vector<std::size_t> Next();

 private:
  std::int64_t num_examples_;
  double rate_;
  Rng rng_;
};

// g / max(1, |g|_2 / C).
absl::StatusOr<PerExampleGradient> ClipGradient(const PerExampleGradient& g,
                                                double clip_norm);

// (1/|B|) (sum_i clipped_i + xi), xi ~ N(0, z^2 C^2 I), drawn coordinate by
// coordinate from `rng`. No draws are made when z == 0.
absl::StatusOr<Eigen::VectorXd> NoisyAggregate(std::span<const PerExampleGradient> clipped,
                                               double clip_norm, double noise_multiplier,
                                               Rng& rng);

struct DpTrainOptions {
  // Checks the post-clip norm bound on every example of every step.
  bool debug_checks = false;
};

// Runs config.steps() DP-SGD steps on `train`. When `budget` is given the
// configuration must satisfy it according to the accountant.
absl::StatusOr<TrainedModel> DpTrain(const EncodedMatrix& train,
                                     const EncodingMap& encoding,
                                     const DpSgdConfig& config,
                                     std::optional<PrivacyBudget> budget,
                                     const EncodedMatrix* validation = nullptr,
                                     const DpTrainOptions& options = {});

// Non-private minibatch SGD on cross-entropy: a seeded shuffle per epoch,
// contiguous batches of `batch_size`, mean gradient per batch.
struct SgdOptions {
  std::int64_t batch_size = 128;
  int epochs = 20;
  double learning_rate = 0.1;
  // Epoch e uses learning_rate * (1 - (1 - f) * e / epochs), f being this
  // fraction. 1 keeps the rate constant.
  double final_learning_rate_fraction = 1.0;
};

absl::StatusOr<MlpModel> TrainSgd(MlpModel model, const EncodedMatrix& data,
                                  const SgdOptions& options, std::uint64_t seed);

absl::StatusOr<double> Accuracy(const MlpModel& model, const EncodedMatrix& data);

struct HyperGrid {
  std::vector<std::int64_t> batch_sizes = {64, 128, 256};
  std::vector<int> epochs = {10, 20, 40};
  std::vector<double> learning_rates = {0.05, 0.1, 0.2};
  int warmup_epochs = 1;
};

struct TunedHyperparameters {
  std::int64_t batch_size = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  double clip_norm = 0.0;
  double validation_accuracy = 0.0;
};

// Per-example gradient norms observed during a non-private warm-up run of
// `warmup_epochs` epochs of TrainSgd-style updates.
absl::StatusOr<std::vector<double>> WarmupGradientNorms(
    const EncodedMatrix& train, std::span<const int> hidden, std::int64_t batch_size,
    double learning_rate, int warmup_epochs, std::uint64_t seed);

// Median of WarmupGradientNorms.
absl::StatusOr<double> CalibrateClipNorm(const EncodedMatrix& train,
                                         std::span<const int> hidden,
                                         std::int64_t batch_size, double learning_rate,
                                         int warmup_epochs, std::uint64_t seed);

// Grid search for (b, E, eta) by non-private validation accuracy, then C from
// the warm-up median norm. Points are visited b-major, then eta, then E; ties
// go to the first point visited.
absl::StatusOr<TunedHyperparameters> TuneHyperparameters(const EncodedMatrix& train,
                                                         const EncodedMatrix& validation,
                                                         const HyperGrid& grid,
                                                         std::span<const int> hidden,
                                                         std::uint64_t seed);

// Config echo used in diagnostics and provenance.
std::string DescribeConfig(const DpSgdConfig& config);

}  // namespace dpsynth

#endif  // DPSYNTH_DPSGD_TRAINER_H_
