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

#include "dpsynth/dpsgd_trainer.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpsynth/status_macros.h"

namespace dpsynth {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void AddGaussianNoise(Eigen::VectorXd& sum, double stddev, Rng& rng) {
  if (stddev == 0.0) return;
  std::normal_distribution<double> gauss(0.0, stddev);
  for (Eigen::Index k = 0; k < sum.size(); ++k) sum[k] += gauss(rng);
}

RowMatrix GatherRows(const RowMatrix& x, std::span<const std::size_t> rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> GatherLabels(std::span<const int> y, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(y[r]);
  return out;
}

absl::Status CheckData(const EncodedMatrix& data, int class_count) {
  if (data.num_rows() == 0) return absl::InvalidArgumentError("training data is empty");
  if (data.labels.size() != data.num_rows()) {
    return absl::InvalidArgumentError("feature rows and labels differ in count");
  }
  for (int y : data.labels) {
    if (y < 0 || y >= class_count) {
      return absl::OutOfRangeError(absl::StrCat("label ", y, " outside [0, ", class_count, ")"));
    }
  }
  return absl::OkStatus();
}

int ClassCountOf(const EncodedMatrix& data) {
  int k = 2;
  for (int y : data.labels) k = std::max(k, y + 1);
  return k;
}

// Seeded epoch-shuffled minibatch SGD. `on_batch` sees each batch before the
// update; `on_epoch` after every epoch and may stop training by returning
// false.
using BatchHook =
    std::function<absl::Status(const MlpModel&, const RowMatrix&, std::span<const int>)>;
using EpochHook = std::function<bool(int epoch, const MlpModel&)>;

absl::StatusOr<MlpModel> RunSgd(MlpModel model, const EncodedMatrix& data,
                                const SgdOptions& options, std::uint64_t seed,
                                const BatchHook& on_batch, const EpochHook& on_epoch) {
  if (options.batch_size < 1 || options.epochs < 0 || !(options.learning_rate > 0) ||
      !(options.final_learning_rate_fraction >= 0)) {
    return absl::InvalidArgumentError("SGD options must be positive");
  }
  RETURN_IF_ERROR(CheckData(data, model.class_count()));
  const std::size_t n = data.num_rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double lr =
        options.learning_rate * (1.0 - (1.0 - options.final_learning_rate_fraction) *
                                           static_cast<double>(epoch) / options.epochs);
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(options.batch_size));
      std::span<const std::size_t> rows(order.data() + start, end - start);
      const RowMatrix xb = GatherRows(data.features, rows);
      const std::vector<int> yb = GatherLabels(data.labels, rows);
      if (on_batch) RETURN_IF_ERROR(on_batch(model, xb, yb));
      double loss = 0.0;
      ASSIGN_OR_RETURN(Eigen::VectorXd grad, MeanGradient(model, xb, yb, &loss));
      model.mutable_parameters() -= lr * grad;
      if (!std::isfinite(loss) || !model.AllFinite()) {
        return absl::InternalError(absl::StrFormat(
            "SGD diverged in epoch %d (batch_size=%d, learning_rate=%g)", epoch,
            options.batch_size, options.learning_rate));
      }
    }
    if (on_epoch && !on_epoch(epoch + 1, model)) break;
  }
  return model;
}

double Median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

absl::Status DpSgdConfig::Validate() const {
  if (num_examples < 1 || batch_size < 1 || epochs < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "N, b and E must be positive: ", DescribeConfig(*this)));
  }
  if (batch_size > num_examples) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch size exceeds training set size: ", DescribeConfig(*this)));
  }
  if (!(learning_rate > 0) || !(clip_norm > 0) || !(noise_multiplier >= 0) ||
      !std::isfinite(learning_rate) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "learning rate and clip norm must be positive, noise multiplier "
        "non-negative: ",
        DescribeConfig(*this)));
  }
  for (int h : hidden_layers) {
    if (h < 1) return absl::InvalidArgumentError("hidden layer widths must be positive");
  }
  return absl::OkStatus();
}

std::int64_t DpSgdConfig::steps() const {
  if (batch_size < 1) return 0;
  return static_cast<std::int64_t>(epochs) * ((num_examples + batch_size - 1) / batch_size);
}

std::string DescribeConfig(const DpSgdConfig& c) {
  return absl::StrFormat(
      "N=%d b=%d E=%d eta=%g C=%g z=%g seed=%d hidden=[%s]", c.num_examples,
      c.batch_size, c.epochs, c.learning_rate, c.clip_norm, c.noise_multiplier, c.seed,
      absl::StrJoin(c.hidden_layers, ","));
}

PoissonBatchSampler::PoissonBatchSampler(std::int64_t num_examples,
                                         std::int64_t batch_size, std::uint64_t seed)
    : num_examples_(num_examples),
      rate_(static_cast<double>(batch_size) / static_cast<double>(num_examples)),
      rng_(seed) {}

std::vector<std::size_t> PoissonBatchSampler::Next() {
  std::vector<std::size_t> batch;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t i = 0; i < num_examples_; ++i) {
    if (u(rng_) < rate_) batch.push_back(static_cast<std::size_t>(i));
  }
  return batch;
}

absl::StatusOr<PerExampleGradient> ClipGradient(const PerExampleGradient& g,
                                                double clip_norm) {
  if (!(clip_norm > 0)) {
    return absl::InvalidArgumentError(absl::StrCat("clip norm must be positive, got ", clip_norm));
  }
  const double norm = g.values.norm();
  if (!std::isfinite(norm)) {
    return absl::InternalError("non-finite per-example gradient");
  }
  return PerExampleGradient{.values = g.values / std::max(1.0, norm / clip_norm)};
}

absl::StatusOr<Eigen::VectorXd> NoisyAggregate(std::span<const PerExampleGradient> clipped,
                                               double clip_norm, double noise_multiplier,
                                               Rng& rng) {
  if (clipped.empty()) {
    return absl::FailedPreconditionError("empty batch: no update is taken");
  }
  if (!(noise_multiplier >= 0) || !(clip_norm > 0)) {
    return absl::InvalidArgumentError("noise multiplier must be >= 0 and clip norm > 0");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(clipped.front().values.size());
  for (const auto& g : clipped) {
    if (g.values.size() != sum.size()) {
      return absl::InvalidArgumentError("gradients differ in shape");
    }
    sum += g.values;
  }
  AddGaussianNoise(sum, noise_multiplier * clip_norm, rng);
  return sum / static_cast<double>(clipped.size());
}

absl::StatusOr<TrainedModel> DpTrain(const EncodedMatrix& train,
                                     const EncodingMap& encoding,
                                     const DpSgdConfig& config,
                                     std::optional<PrivacyBudget> budget,
                                     const EncodedMatrix* validation,
                                     const DpTrainOptions& options) {
  RETURN_IF_ERROR(config.Validate());
  const int class_count = static_cast<int>(encoding.class_count());
  RETURN_IF_ERROR(CheckData(train, class_count));
  if (static_cast<std::int64_t>(train.num_rows()) != config.num_examples) {
    return absl::InvalidArgumentError(absl::StrCat(
        "config declares N=", config.num_examples, " but data has ", train.num_rows(),
        " rows"));
  }
  if (static_cast<std::size_t>(train.features.cols()) != encoding.width) {
    return absl::InvalidArgumentError("feature width does not match encoding");
  }

  const PrivacyBudget declared = budget.value_or(PrivacyBudget{});
  double epsilon_spent = std::numeric_limits<double>::infinity();
  if (config.noise_multiplier > 0) {
    ASSIGN_OR_RETURN(epsilon_spent,
                     ComputeEpsilon(config.num_examples, config.batch_size, config.epochs,
                                    config.noise_multiplier, declared.delta));
  }
  if (budget) {
    RETURN_IF_ERROR(budget->Validate());
    if (!(epsilon_spent <= budget->epsilon * (1 + 1e-12))) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "noise multiplier is not calibrated for the budget: config spends "
          "epsilon=%g > %g (%s)",
          epsilon_spent, budget->epsilon, DescribeConfig(config)));
    }
  }

  ASSIGN_OR_RETURN(
      MlpModel model,
      MlpModel::Initialize(MakeArchitecture(static_cast<int>(train.features.cols()),
                                            config.hidden_layers, class_count),
                           DeriveSeed(config.seed, SeedStream::kInit)));
  PoissonBatchSampler sampler(config.num_examples, config.batch_size,
                              DeriveSeed(config.seed, SeedStream::kBatchSampling));
  Rng noise_rng(DeriveSeed(config.seed, SeedStream::kNoise));
  const double clip = config.clip_norm;
  TrainingStats stats;
  std::vector<double> losses;

  for (std::int64_t step = 0; step < config.steps(); ++step) {
    ++stats.steps;
    const std::vector<std::size_t> batch = sampler.Next();
    if (batch.empty()) {
      ++stats.empty_batches;
      continue;
    }
    stats.examples_seen += static_cast<std::int64_t>(batch.size());
    const RowMatrix xb = GatherRows(train.features, batch);
    const std::vector<int> yb = GatherLabels(train.labels, batch);
    ASSIGN_OR_RETURN(RowMatrix grads, PerExampleGradients(model, xb, yb, &losses));

    double loss_sum = 0.0;
    for (double l : losses) loss_sum += l;
    if (!std::isfinite(loss_sum)) {
      return absl::InternalError(absl::StrCat("training diverged at step ", step,
                                              ": non-finite loss (", DescribeConfig(config),
                                              ")"));
    }
    stats.final_batch_loss = loss_sum / static_cast<double>(batch.size());

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(grads.cols());
    for (Eigen::Index i = 0; i < grads.rows(); ++i) {
      auto g = grads.row(i);
      const double norm = g.norm();
      if (!std::isfinite(norm)) {
        return absl::InternalError(absl::StrCat("training diverged at step ", step,
                                                ": non-finite gradient (",
                                                DescribeConfig(config), ")"));
      }
      const double scale = 1.0 / std::max(1.0, norm / clip);
      const double clipped_norm = norm * scale;
      stats.max_clipped_norm = std::max(stats.max_clipped_norm, clipped_norm);
      if (options.debug_checks) {
        const double actual = (g * scale).norm();
        if (actual > clip + 1e-9) {
          return absl::InternalError(absl::StrFormat(
              "post-clip bound violated at step %d: |g|=%.17g > C=%g", step, actual, clip));
        }
      }
      sum += scale * g.transpose();
    }
    AddGaussianNoise(sum, config.noise_multiplier * clip, noise_rng);
    model.mutable_parameters() -=
        (config.learning_rate / static_cast<double>(batch.size())) * sum;
    if (!model.AllFinite()) {
      return absl::InternalError(absl::StrCat("training diverged at step ", step,
                                              ": non-finite parameters (",
                                              DescribeConfig(config), ")"));
    }
  }

  double validation_accuracy = kNaN;
  if (validation != nullptr && validation->num_rows() > 0) {
    ASSIGN_OR_RETURN(validation_accuracy, Accuracy(model, *validation));
  }
  return TrainedModel{.model = std::move(model),
                      .encoding = encoding,
                      .config = config,
                      .budget = declared,
                      .epsilon_spent = epsilon_spent,
                      .validation_accuracy = validation_accuracy,
                      .stats = stats};
}

absl::StatusOr<MlpModel> TrainSgd(MlpModel model, const EncodedMatrix& data,
                                  const SgdOptions& options, std::uint64_t seed) {
  return RunSgd(std::move(model), data, options, seed, nullptr, nullptr);
}

absl::StatusOr<double> Accuracy(const MlpModel& model, const EncodedMatrix& data) {
  if (data.num_rows() == 0) return absl::InvalidArgumentError("accuracy of empty data");
  ASSIGN_OR_RETURN(std::vector<int> pred, PredictBatch(model, data.features));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == data.labels[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

absl::StatusOr<std::vector<double>> WarmupGradientNorms(
    const EncodedMatrix& train, std::span<const int> hidden, std::int64_t batch_size,
    double learning_rate, int warmup_epochs, std::uint64_t seed) {
  const int class_count = ClassCountOf(train);
  ASSIGN_OR_RETURN(
      MlpModel model,
      MlpModel::Initialize(
          MakeArchitecture(static_cast<int>(train.features.cols()), hidden, class_count),
          DeriveSeed(seed, SeedStream::kInit)));
  std::vector<double> norms;
  auto record = [&](const MlpModel& m, const RowMatrix& xb,
                    std::span<const int> yb) -> absl::Status {
    ASSIGN_OR_RETURN(RowMatrix g, PerExampleGradients(m, xb, yb));
    for (Eigen::Index i = 0; i < g.rows(); ++i) norms.push_back(g.row(i).norm());
    return absl::OkStatus();
  };
  SgdOptions options{.batch_size = batch_size, .epochs = warmup_epochs,
                     .learning_rate = learning_rate};
  RETURN_IF_ERROR(RunSgd(std::move(model), train, options,
                         DeriveSeed(seed, SeedStream::kWarmup), record, nullptr)
                      .status());
  return norms;
}

absl::StatusOr<double> CalibrateClipNorm(const EncodedMatrix& train,
                                         std::span<const int> hidden,
                                         std::int64_t batch_size, double learning_rate,
                                         int warmup_epochs, std::uint64_t seed) {
  if (warmup_epochs < 1) return absl::InvalidArgumentError("warm-up needs at least one epoch");
  ASSIGN_OR_RETURN(std::vector<double> norms,
                   WarmupGradientNorms(train, hidden, batch_size, learning_rate,
                                       warmup_epochs, seed));
  const double c = Median(std::move(norms));
  if (!(c > 0) || !std::isfinite(c)) {
    return absl::InternalError(absl::StrCat("warm-up produced unusable median norm ", c));
  }
  return c;
}

absl::StatusOr<TunedHyperparameters> TuneHyperparameters(const EncodedMatrix& train,
                                                         const EncodedMatrix& validation,
                                                         const HyperGrid& grid,
                                                         std::span<const int> hidden,
                                                         std::uint64_t seed) {
  if (grid.batch_sizes.empty() || grid.epochs.empty() || grid.learning_rates.empty()) {
    return absl::InvalidArgumentError("hyperparameter grid is empty");
  }
  const int class_count = ClassCountOf(train);
  std::optional<TunedHyperparameters> best;
  std::vector<std::string> failures;
  const int max_epochs = *std::max_element(grid.epochs.begin(), grid.epochs.end());

  for (std::int64_t b : grid.batch_sizes) {
    for (double eta : grid.learning_rates) {
      // Runs with equal (b, eta) and seed share their prefix, so one run to
      // the largest E scores every epoch count in the grid.
      std::vector<double> acc_at_epoch(static_cast<std::size_t>(max_epochs) + 1, kNaN);
      absl::Status scoring = absl::OkStatus();
      auto on_epoch = [&](int epoch, const MlpModel& m) {
        if (std::find(grid.epochs.begin(), grid.epochs.end(), epoch) != grid.epochs.end()) {
          auto acc = Accuracy(m, validation);
          if (!acc.ok()) {
            scoring = acc.status();
            return false;
          }
          acc_at_epoch[static_cast<std::size_t>(epoch)] = *acc;
        }
        return epoch < max_epochs;
      };
      ASSIGN_OR_RETURN(
          MlpModel init,
          MlpModel::Initialize(
              MakeArchitecture(static_cast<int>(train.features.cols()), hidden, class_count),
              DeriveSeed(seed, SeedStream::kInit)));
      SgdOptions options{.batch_size = b, .epochs = max_epochs, .learning_rate = eta};
      auto run = RunSgd(std::move(init), train, options, DeriveSeed(seed, SeedStream::kWarmup),
                        nullptr, on_epoch);
      RETURN_IF_ERROR(scoring);
      for (int e : grid.epochs) {
        const double acc = acc_at_epoch[static_cast<std::size_t>(e)];
        if (std::isnan(acc)) {
          failures.push_back(absl::StrFormat("(b=%d, E=%d, eta=%g): %s", b, e, eta,
                                             run.ok() ? "not reached"
                                                      : run.status().message()));
          continue;
        }
        if (!best || acc > best->validation_accuracy) {
          best = TunedHyperparameters{.batch_size = b, .epochs = e, .learning_rate = eta,
                                      .clip_norm = 0.0, .validation_accuracy = acc};
        }
      }
    }
  }
  if (!best) {
    return absl::InternalError(absl::StrCat("every grid point diverged: ",
                                            absl::StrJoin(failures, "; ")));
  }
  ASSIGN_OR_RETURN(best->clip_norm,
                   CalibrateClipNorm(train, hidden, best->batch_size, best->learning_rate,
                                     grid.warmup_epochs, seed));
  return *best;
}

}  // namespace dpsynth
