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

#include "dpsynth/downstream_eval.h"

#include <chrono>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsynth/rng.h"
#include "dpsynth/status_macros.h"

namespace dpsynth {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

absl::StatusOr<int> PositiveIndex(const EncodingMap& map) {
  if (map.class_count() == 0) return absl::FailedPreconditionError("label has no classes");
  if (map.positive_label.empty()) return static_cast<int>(map.class_count()) - 1;
  std::optional<int> k = map.label.CategoryIndex(map.positive_label);
  if (!k) {
    return absl::FailedPreconditionError(absl::StrCat(
        "positive label '", map.positive_label, "' is not a value of '", map.label.name, "'"));
  }
  return *k;
}

std::uint64_t DownstreamSeed(std::uint64_t seed, DownstreamModelKind kind) {
  return DeriveSeed(seed, SeedStream::kDownstream, static_cast<std::uint64_t>(kind));
}

struct Accumulator {
  EvalReport report;
  bool failed = false;

  void Add(const Metrics& m, std::uint64_t seed, double synth_s, double train_s) {
    report.repeats.push_back({.seed = seed,
                              .accuracy = m.accuracy,
                              .f1 = m.f1,
                              .collapse = m.collapse,
                              .synth_runtime_s = synth_s,
                              .train_runtime_s = train_s});
  }

  void Finish() {
    const auto& rs = report.repeats;
    report.repeat_count = static_cast<int>(rs.size());
    if (rs.empty()) return;
    double acc = 0, f1 = 0, synth = 0, train = 0;
    for (const RepeatResult& r : rs) {
      acc += r.accuracy;
      f1 += r.f1;
      synth += r.synth_runtime_s;
      train += r.train_runtime_s;
      report.collapse = report.collapse || r.collapse;
    }
    const double n = static_cast<double>(rs.size());
    report.accuracy = acc / n;
    report.f1 = f1 / n;
    report.synth_runtime_s = synth / n;
    report.train_runtime_s = train / n;
  }
};

}  // namespace

const char* DownstreamModelKindName(DownstreamModelKind kind) {
  return kind == DownstreamModelKind::kMlp ? "mlp" : "linear_svm";
}

absl::StatusOr<DownstreamModelKind> ParseDownstreamModelKind(std::string_view name) {
  if (name == "mlp") return DownstreamModelKind::kMlp;
  if (name == "linear_svm") return DownstreamModelKind::kLinearSvm;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown model kind '", std::string(name), "' (expected mlp or linear_svm)"));
}

absl::StatusOr<std::vector<int>> DownstreamModel::Predict(const TabularDataset& d) const {
  ASSIGN_OR_RETURN(RowMatrix x, EncodeFeatures(d.Attributes(), encoding_));
  if (const auto* mlp = std::get_if<MlpModel>(&model_)) return PredictBatch(*mlp, x);
  const auto& svm = std::get<LinearSvm>(model_);
  std::vector<int> out(d.num_rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = svm.Score(x.row(i).transpose()) >= 0 ? positive_class_ : 1 - positive_class_;
  }
  return out;
}

absl::StatusOr<DownstreamModel> TrainDownstream(DownstreamModelKind kind,
                                                const TabularDataset& train,
                                                const DownstreamOptions& options,
                                                std::uint64_t seed) {
  if (train.num_rows() == 0) {
    return absl::InvalidArgumentError("downstream training set is empty");
  }
  ASSIGN_OR_RETURN(EncodingMap map, FitEncoding(train));
  ASSIGN_OR_RETURN(EncodedMatrix data, Encode(train, map));
  ASSIGN_OR_RETURN(const int positive, PositiveIndex(map));
  bool degenerate = true;
  for (int y : data.labels) degenerate = degenerate && y == data.labels.front();

  if (kind == DownstreamModelKind::kMlp) {
    ASSIGN_OR_RETURN(
        MlpModel init,
        MlpModel::Initialize(MakeArchitecture(static_cast<int>(map.width), options.mlp_hidden,
                                              static_cast<int>(map.class_count())),
                             DeriveSeed(seed, SeedStream::kInit)));
    ASSIGN_OR_RETURN(MlpModel mlp, TrainSgd(std::move(init), data, options.mlp_sgd, seed));
    return DownstreamModel(kind, std::move(map), positive, std::move(mlp), degenerate);
  }
  if (map.class_count() != 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "linear_svm is binary-only; label '", map.label.name, "' has ", map.class_count(),
        " classes"));
  }
  std::vector<double> targets(data.labels.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    targets[i] = data.labels[i] == positive ? 1.0 : -1.0;
  }
  ASSIGN_OR_RETURN(LinearSvm svm, TrainLinearSvm(data.features, targets, options.svm, seed));
  return DownstreamModel(kind, std::move(map), positive, std::move(svm), degenerate);
}

absl::StatusOr<DownstreamModel> TrainDownstream(DownstreamModelKind kind,
                                                const SyntheticDataset& synth,
                                                const DownstreamOptions& options,
                                                std::uint64_t seed) {
  ASSIGN_OR_RETURN(TabularDataset d, synth.ToDataset());
  return TrainDownstream(kind, d, options, seed);
}

absl::StatusOr<Metrics> ComputeMetrics(std::span<const int> truth,
                                       std::span<const int> predicted, int positive_class) {
  if (truth.empty()) return absl::InvalidArgumentError("cannot evaluate on an empty test set");
  if (truth.size() != predicted.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        truth.size(), " labels but ", predicted.size(), " predictions"));
  }
  Metrics m;
  std::size_t correct = 0, predicted_positive = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == positive_class;
    const bool p = predicted[i] == positive_class;
    correct += truth[i] == predicted[i];
    predicted_positive += p;
    m.true_positives += t && p;
    m.false_positives += !t && p;
    m.false_negatives += t && !p;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  m.collapse = predicted_positive == 0;
  if (m.true_positives > 0) {
    const double tp2 = 2.0 * static_cast<double>(m.true_positives);
    m.f1 = tp2 / (tp2 + static_cast<double>(m.false_positives + m.false_negatives));
  }
  return m;
}

absl::StatusOr<Metrics> Evaluate(const DownstreamModel& model, const TabularDataset& test) {
  if (test.num_rows() == 0) {
    return absl::InvalidArgumentError("cannot evaluate on an empty test set");
  }
  const AttributeSpec& label = model.encoding().label;
  if (test.schema().label.name != label.name) {
    return absl::FailedPreconditionError(absl::StrCat(
        "test label '", test.schema().label.name, "' differs from the model's label '",
        label.name, "'"));
  }
  std::vector<int> truth(test.num_rows());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::string value = test.LabelText(i);
    std::optional<int> k = label.CategoryIndex(value);
    if (!k) {
      return absl::OutOfRangeError(
          absl::StrCat("test row ", i, ": label '", value, "' is unknown to the model"));
    }
    truth[i] = *k;
  }
  ASSIGN_OR_RETURN(std::vector<int> predicted, model.Predict(test));
  return ComputeMetrics(truth, predicted, model.positive_class());
}

absl::StatusOr<TrainedModel> TrainPrivateModel(const DatasetSplit& split,
                                               const TrainerSettings& trainer,
                                               const PrivacyBudget& budget,
                                               std::uint64_t seed) {
  RETURN_IF_ERROR(budget.Validate());
  ASSIGN_OR_RETURN(EncodingMap map, FitEncoding(split.train));
  ASSIGN_OR_RETURN(EncodedMatrix train, Encode(split.train, map));
  ASSIGN_OR_RETURN(EncodedMatrix validation, Encode(split.validation, map));
  const auto n = static_cast<std::int64_t>(train.num_rows());

  DpSgdConfig config{.num_examples = n,
                     .batch_size = std::min(trainer.batch_size, n),
                     .epochs = trainer.epochs,
                     .learning_rate = trainer.learning_rate,
                     .seed = seed,
                     .hidden_layers = trainer.hidden_layers};
  if (trainer.tune) {
    HyperGrid grid = trainer.grid;
    grid.warmup_epochs = trainer.warmup_epochs;
    ASSIGN_OR_RETURN(TunedHyperparameters tuned,
                     TuneHyperparameters(train, validation, grid, trainer.hidden_layers, seed));
    config.batch_size = std::min(tuned.batch_size, n);
    config.epochs = tuned.epochs;
    config.learning_rate = tuned.learning_rate;
    config.clip_norm = tuned.clip_norm;
  } else {
    ASSIGN_OR_RETURN(config.clip_norm,
                     CalibrateClipNorm(train, trainer.hidden_layers, config.batch_size,
                                       config.learning_rate, trainer.warmup_epochs, seed));
  }
  if (trainer.clip_norm) config.clip_norm = *trainer.clip_norm;
  if (trainer.noise_multiplier) {
    config.noise_multiplier = *trainer.noise_multiplier;
  } else {
    ASSIGN_OR_RETURN(config.noise_multiplier,
                     ComputeNoise(n, config.batch_size, config.epochs, budget));
  }
  return DpTrain(train, map, config, budget, &validation);
}

absl::StatusOr<PipelineRun> RunPipeline(const TabularDataset& data,
                                        const TrainerSettings& trainer,
                                        const PrivacyBudget& budget, std::uint64_t seed) {
  RETURN_IF_ERROR(budget.Validate());
  ASSIGN_OR_RETURN(DatasetSplit split, Split(data, DeriveSeed(seed, SeedStream::kSplit)));
  const Clock::time_point start = Clock::now();
  ASSIGN_OR_RETURN(TrainedModel model, TrainPrivateModel(split, trainer, budget, seed));
  ASSIGN_OR_RETURN(SyntheticDataset synthetic, Synthesize(split.train, model, seed));
  const double elapsed = SecondsSince(start);
  return PipelineRun{.split = std::move(split),
                     .model = std::move(model),
                     .synthetic = std::move(synthetic),
                     .synth_seconds = elapsed};
}

absl::StatusOr<std::vector<EvalReport>> RunBenchmark(const TabularDataset& data,
                                                     std::string_view dataset_id,
                                                     const BenchmarkOptions& options) {
  if (options.repeats < 1) return absl::InvalidArgumentError("repeats must be >= 1");
  if (options.kinds.empty()) return absl::InvalidArgumentError("no downstream model kinds");
  const std::size_t k = options.kinds.size();
  std::vector<Accumulator> dp(k), np(k);
  for (std::size_t m = 0; m < k; ++m) {
    for (auto* acc : {&dp[m], &np[m]}) {
      acc->report.dataset_id = std::string(dataset_id);
      acc->report.model_kind = options.kinds[m];
      acc->report.seed = options.seed;
    }
    dp[m].report.synthesizer_id = kSynthesizerId;
    dp[m].report.budget = options.budget;
    np[m].report.synthesizer_id = kBaselineId;
  }

  const Clock::time_point cell_start = Clock::now();
  for (int r = 0; r < options.repeats; ++r) {
    const std::uint64_t seed =
        DeriveSeed(options.seed, SeedStream::kRepeat, static_cast<std::uint64_t>(r));
    auto run = RunPipeline(data, options.trainer, options.budget, seed);
    if (!run.ok()) {
      return absl::Status(run.status().code(),
                          absl::StrCat("repeat ", r, " (seed ", seed, "): ",
                                       run.status().message()));
    }
    const double synth_s = options.record_runtime ? run->synth_seconds : 0.0;
    const auto train_rows = static_cast<std::int64_t>(run->split.train.num_rows());

    for (std::size_t m = 0; m < k; ++m) {
      const DownstreamModelKind kind = options.kinds[m];
      const std::uint64_t model_seed = DownstreamSeed(seed, kind);
      const std::string where = absl::StrCat("repeat ", r, " ", DownstreamModelKindName(kind));

      Clock::time_point t0 = Clock::now();
      auto model = TrainDownstream(kind, run->synthetic, options.downstream, model_seed);
      if (!model.ok()) {
        return absl::Status(model.status().code(),
                            absl::StrCat(where, ": ", model.status().message()));
      }
      const double train_s = options.record_runtime ? SecondsSince(t0) : 0.0;
      ASSIGN_OR_RETURN(Metrics metrics, Evaluate(*model, run->split.test));
      EvalReport& rep = dp[m].report;
      if (model->degenerate_labels()) {
        rep.warnings.push_back(absl::StrCat(where, ": synthetic labels contain a single class"));
      }
      dp[m].Add(metrics, seed, synth_s, train_s);
      rep.train_rows = train_rows;
      rep.sampling_rate = static_cast<double>(run->model.config.batch_size) /
                          static_cast<double>(train_rows);
      rep.noise_multiplier = run->model.config.noise_multiplier;
      rep.epsilon_spent = run->model.epsilon_spent;

      if (options.include_baseline) {
        t0 = Clock::now();
        ASSIGN_OR_RETURN(DownstreamModel base, TrainDownstream(kind, run->split.train,
                                                               options.downstream, model_seed));
        const double base_s = options.record_runtime ? SecondsSince(t0) : 0.0;
        ASSIGN_OR_RETURN(Metrics base_metrics, Evaluate(base, run->split.test));
        np[m].Add(base_metrics, seed, 0.0, base_s);
        np[m].report.train_rows = train_rows;
      }
    }
    if (SecondsSince(cell_start) > options.timeout_seconds) {
      for (auto& acc : dp) {
        acc.report.timed_out = true;
        acc.report.warnings.push_back(absl::StrCat("timed out after ", r + 1, " of ",
                                                   options.repeats, " repeats"));
      }
      break;
    }
  }

  std::vector<EvalReport> out;
  for (auto* group : {&dp, &np}) {
    if (group == &np && !options.include_baseline) break;
    for (Accumulator& acc : *group) {
      acc.Finish();
      out.push_back(std::move(acc.report));
    }
  }
  return out;
}

absl::StatusOr<std::vector<EvalReport>> ScalabilityRun(const TabularDataset& data,
                                                       std::string_view dataset_id,
                                                       std::span<const std::size_t> factors,
                                                       const BenchmarkOptions& options) {
  std::vector<EvalReport> out;
  for (std::size_t f : factors) {
    if (f < 1 || f > 3) {
      return absl::InvalidArgumentError(absl::StrCat("scale factor ", f, " is not in {1,2,3}"));
    }
    ASSIGN_OR_RETURN(TabularDataset scaled,
                     BootstrapScale(data, f, DeriveSeed(options.seed, SeedStream::kBootstrap, f)));
    auto reports = RunBenchmark(scaled, dataset_id, options);
    if (!reports.ok()) {
      return absl::Status(reports.status().code(),
                          absl::StrCat("factor ", f, ": ", reports.status().message()));
    }
    for (EvalReport& rep : *reports) {
      rep.scale_factor = f;
      out.push_back(std::move(rep));
    }
  }
  return out;
}

absl::StatusOr<std::vector<EvalReport>> EvaluateDataset(
    const TabularDataset& train, const TabularDataset& test, std::string_view dataset_id,
    std::string_view synthesizer_id, std::span<const DownstreamModelKind> kinds,
    const DownstreamOptions& options, std::uint64_t seed, bool record_runtime) {
  std::vector<EvalReport> out;
  for (DownstreamModelKind kind : kinds) {
    const Clock::time_point t0 = Clock::now();
    ASSIGN_OR_RETURN(DownstreamModel model,
                     TrainDownstream(kind, train, options, DownstreamSeed(seed, kind)));
    const double train_s = record_runtime ? SecondsSince(t0) : 0.0;
    ASSIGN_OR_RETURN(Metrics metrics, Evaluate(model, test));
    Accumulator acc;
    acc.report.dataset_id = std::string(dataset_id);
    acc.report.synthesizer_id = std::string(synthesizer_id);
    acc.report.model_kind = kind;
    acc.report.seed = seed;
    acc.report.train_rows = static_cast<std::int64_t>(train.num_rows());
    if (model.degenerate_labels()) {
      acc.report.warnings.push_back("training labels contain a single class");
    }
    acc.Add(metrics, seed, 0.0, train_s);
    acc.Finish();
    out.push_back(std::move(acc.report));
  }
  return out;
}

}  // namespace dpsynth
