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

// Train-on-synthetic / test-on-real evaluation: downstream models, metrics,
// the repeated benchmark and the bootstrap scalability sweep.

#ifndef DPSYNTH_DOWNSTREAM_EVAL_H_
#define DPSYNTH_DOWNSTREAM_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/dpsgd_trainer.h"
#include "dpsynth/linear_svm.h"
#include "dpsynth/mlp.h"
#include "dpsynth/privacy_accountant.h"
#include "dpsynth/synthesizer.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {

enum class DownstreamModelKind { kMlp, kLinearSvm };

const char* DownstreamModelKindName(DownstreamModelKind kind);
absl::StatusOr<DownstreamModelKind> ParseDownstreamModelKind(std::string_view name);

inline constexpr char kSynthesizerId[] = "dpsynth";
inline constexpr char kBaselineId[] = "np_baseline";

struct DownstreamOptions {
  std::vector<int> mlp_hidden = {64, 64};
  SgdOptions mlp_sgd = {.batch_size = 128,
                        .epochs = 20,
                        .learning_rate = 0.2,
                        .final_learning_rate_fraction = 0.05};
  LinearSvmOptions svm;
};

class DownstreamModel {
 public:
  DownstreamModelKind kind() const { return kind_; }
  const EncodingMap& encoding() const { return encoding_; }
  int positive_class() const { return positive_class_; }
  // Training labels contained a single class.
  bool degenerate_labels() const { return degenerate_labels_; }

  // Predicted label indices in encoding().label.
  absl::StatusOr<std::vector<int>> Predict(const TabularDataset& d) const;

 private:
  friend absl::StatusOr<DownstreamModel> TrainDownstream(DownstreamModelKind,
                                                         const TabularDataset&,
                                                         const DownstreamOptions&,
                                                         std::uint64_t);
  DownstreamModel(DownstreamModelKind kind, EncodingMap encoding, int positive_class,
                  std::variant<MlpModel, LinearSvm> model, bool degenerate)
      : kind_(kind),
        encoding_(std::move(encoding)),
        positive_class_(positive_class),
        model_(std::move(model)),
        degenerate_labels_(degenerate) {}

  DownstreamModelKind kind_;
  EncodingMap encoding_;
  int positive_class_ = 1;
  std::variant<MlpModel, LinearSvm> model_;
  bool degenerate_labels_ = false;
};

absl::StatusOr<DownstreamModel> TrainDownstream(DownstreamModelKind kind,
                                                const TabularDataset& train,
                                                const DownstreamOptions& options,
                                                std::uint64_t seed);
absl::StatusOr<DownstreamModel> TrainDownstream(DownstreamModelKind kind,
                                                const SyntheticDataset& synth,
                                                const DownstreamOptions& options,
                                                std::uint64_t seed);

struct Metrics {
  double accuracy = 0.0;
  // Binary F1 of the positive class; 0 when it is never predicted correctly.
  double f1 = 0.0;
  // The positive class was never predicted.
  bool collapse = false;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

absl::StatusOr<Metrics> ComputeMetrics(std::span<const int> truth,
                                       std::span<const int> predicted, int positive_class);

absl::StatusOr<Metrics> Evaluate(const DownstreamModel& model, const TabularDataset& test);

struct TrainerSettings {
  std::int64_t batch_size = 256;
  int epochs = 20;
  double learning_rate = 0.5;
  // Calibrated from the warm-up median gradient norm when unset.
  std::optional<double> clip_norm;
  // Computed by the accountant when unset.
  std::optional<double> noise_multiplier;
  std::vector<int> hidden_layers = {64, 64};
  bool tune = false;
  HyperGrid grid;
  int warmup_epochs = 1;
};

// Fits the encoding on split.train, settles (b, E, eta, C), calibrates z for
// `budget` and runs DpTrain with split.validation as the validation set.
absl::StatusOr<TrainedModel> TrainPrivateModel(const DatasetSplit& split,
                                               const TrainerSettings& trainer,
                                               const PrivacyBudget& budget,
                                               std::uint64_t seed);

// One split -> DP training -> synthesis pass.
struct PipelineRun {
  DatasetSplit split;
  TrainedModel model;
  SyntheticDataset synthetic;
  double synth_seconds = 0.0;
};

absl::StatusOr<PipelineRun> RunPipeline(const TabularDataset& data,
                                        const TrainerSettings& trainer,
                                        const PrivacyBudget& budget, std::uint64_t seed);

struct BenchmarkOptions {
  PrivacyBudget budget;
  std::vector<DownstreamModelKind> kinds = {DownstreamModelKind::kMlp,
                                            DownstreamModelKind::kLinearSvm};
  int repeats = 5;
  std::uint64_t seed = 0;
  TrainerSettings trainer;
  DownstreamOptions downstream;
  bool include_baseline = true;
  // Cells still running past this wall-clock limit are reported as timed out.
  double timeout_seconds = 6 * 3600.0;
  // When false, runtime fields are reported as 0 so reports are reproducible
  // byte for byte.
  bool record_runtime = true;
};

struct RepeatResult {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  bool collapse = false;
  double synth_runtime_s = 0.0;
  double train_runtime_s = 0.0;
};

struct EvalReport {
  std::string dataset_id;
  std::string synthesizer_id;
  DownstreamModelKind model_kind = DownstreamModelKind::kMlp;
  std::size_t scale_factor = 1;
  // Means over `repeats`.
  double accuracy = 0.0;
  double f1 = 0.0;
  double synth_runtime_s = 0.0;
  double train_runtime_s = 0.0;
  std::uint64_t seed = 0;
  int repeat_count = 0;
  // Any repeat collapsed to never predicting the positive class.
  bool collapse = false;
  bool timed_out = false;
  // Unset for non-private rows.
  std::optional<PrivacyBudget> budget;
  std::int64_t train_rows = 0;
  double sampling_rate = 0.0;
  double noise_multiplier = 0.0;
  double epsilon_spent = 0.0;
  std::vector<std::string> warnings;
  std::vector<RepeatResult> repeats;
  // Hash of the run configuration that produced the report, if known.
  std::string config_hash;
};

absl::StatusOr<std::vector<EvalReport>> RunBenchmark(const TabularDataset& data,
                                                     std::string_view dataset_id,
                                                     const BenchmarkOptions& options);

// RunBenchmark on BootstrapScale(data, f) for each factor f in {1, 2, 3}.
absl::StatusOr<std::vector<EvalReport>> ScalabilityRun(const TabularDataset& data,
                                                       std::string_view dataset_id,
                                                       std::span<const std::size_t> factors,
                                                       const BenchmarkOptions& options);

// Trains each downstream kind on `train` and scores it on `test`; no DP
// model involved. Used by the `eval` command.
absl::StatusOr<std::vector<EvalReport>> EvaluateDataset(
    const TabularDataset& train, const TabularDataset& test, std::string_view dataset_id,
    std::string_view synthesizer_id, std::span<const DownstreamModelKind> kinds,
    const DownstreamOptions& options, std::uint64_t seed, bool record_runtime);

}  // namespace dpsynth

#endif  // DPSYNTH_DOWNSTREAM_EVAL_H_
