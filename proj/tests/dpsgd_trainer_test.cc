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
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsynth {
namespace {

using ::testing::HasSubstr;

struct Encoded {
  EncodingMap map;
  EncodedMatrix train;
  EncodedMatrix validation;
};

Encoded MakeEncoded(std::uint64_t seed, std::size_t rows) {
  TabularDataset train = testing::RandomDataset(seed, rows, 2, 3);
  TabularDataset validation = testing::RandomDataset(seed + 1000, rows / 4, 2, 3);
  auto map = FitEncoding(train);
  EXPECT_TRUE(map.ok());
  auto a = Encode(train, *map);
  auto b = Encode(validation, *map);
  EXPECT_TRUE(a.ok() && b.ok());
  return {*map, *std::move(a), *std::move(b)};
}

DpSgdConfig SmallConfig(std::int64_t n) {
  return DpSgdConfig{.num_examples = n,
                     .batch_size = 50,
                     .epochs = 3,
                     .learning_rate = 0.3,
                     .clip_norm = 1.0,
                     .noise_multiplier = 1.0,
                     .seed = 5,
                     .hidden_layers = {8}};
}

TEST(ClipGradientTest, ScalesOnlyLargeGradients) {
  PerExampleGradient big{Eigen::Vector3d(3.0, 4.0, 0.0)};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(PerExampleGradient clipped, ClipGradient(big, 1.0));
  EXPECT_NEAR(clipped.values.norm(), 1.0, 1e-15);
  EXPECT_NEAR(clipped.values[0], 0.6, 1e-15);
  PerExampleGradient small{Eigen::Vector3d(0.3, 0.4, 0.0)};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(PerExampleGradient kept, ClipGradient(small, 1.0));
  EXPECT_EQ(kept.values, small.values);
  EXPECT_FALSE(ClipGradient(small, 0.0).ok());
}

TEST(ClipGradientTest, NormNeverExceedsBound) {
  Rng rng(1);
  std::normal_distribution<double> normal(0.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    PerExampleGradient g{Eigen::VectorXd(17)};
    for (double& v : g.values) v = normal(rng);
    DPSYNTH_ASSERT_OK_AND_ASSIGN(PerExampleGradient c, ClipGradient(g, 0.7));
    EXPECT_LE(c.values.norm(), 0.7 * (1 + 1e-12));
  }
}

TEST(NoisyAggregateTest, NoiseFreeMean) {
  std::vector<PerExampleGradient> grads = {{Eigen::Vector2d(1.0, 0.0)},
                                           {Eigen::Vector2d(0.0, 1.0)}};
  Rng rng(2);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Eigen::VectorXd mean, NoisyAggregate(grads, 1.0, 0.0, rng));
  EXPECT_EQ(mean, Eigen::Vector2d(0.5, 0.5));
  EXPECT_EQ(rng(), Rng(2)());
  EXPECT_EQ(NoisyAggregate({}, 1.0, 1.0, rng).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(NoisyAggregateTest, NoiseHasExpectedMoments) {
  constexpr int kDim = 200000;
  constexpr double kClip = 0.5;
  constexpr double kZ = 1.3;
  std::vector<PerExampleGradient> grads(4, PerExampleGradient{Eigen::VectorXd::Zero(kDim)});
  Rng rng(3);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Eigen::VectorXd out, NoisyAggregate(grads, kClip, kZ, rng));
  const Eigen::VectorXd noise = out * 4.0;
  const double mean = noise.mean();
  const double sd = std::sqrt((noise.array() - mean).square().mean());
  EXPECT_NEAR(mean, 0.0, 5 * kZ * kClip / std::sqrt(kDim));
  EXPECT_NEAR(sd, kZ * kClip, 0.01 * kZ * kClip);
}

TEST(PoissonBatchSamplerTest, MeanBatchSizeAndDeterminism) {
  PoissonBatchSampler a(1000, 50, 9);
  PoissonBatchSampler b(1000, 50, 9);
  double total = 0.0;
  constexpr int kDraws = 2000;
  for (int t = 0; t < kDraws; ++t) {
    std::vector<std::size_t> batch = a.Next();
    EXPECT_EQ(batch, b.Next());
    EXPECT_TRUE(std::is_sorted(batch.begin(), batch.end()));
    total += static_cast<double>(batch.size());
  }
  // Binomial(1000, 0.05) has sd ~6.9; the mean of 2000 draws has sd ~0.15.
  EXPECT_NEAR(total / kDraws, 50.0, 0.8);
}

TEST(DpSgdConfigTest, StepsAndValidation) {
  DpSgdConfig c = SmallConfig(1001);
  EXPECT_EQ(c.steps(), 3 * 21);
  DPSYNTH_EXPECT_OK(c.Validate());
  c.batch_size = 2000;
  EXPECT_FALSE(c.Validate().ok());
  c = SmallConfig(100);
  c.clip_norm = 0.0;
  EXPECT_FALSE(c.Validate().ok());
  c = SmallConfig(100);
  c.noise_multiplier = -1.0;
  EXPECT_FALSE(c.Validate().ok());
}

TEST(DpTrainTest, TrainsAndIsDeterministic) {
  Encoded e = MakeEncoded(1, 1000);
  DpSgdConfig config = SmallConfig(1000);
  config.epochs = 10;
  config.noise_multiplier = 0.8;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TrainedModel a,
                               DpTrain(e.train, e.map, config, std::nullopt, &e.validation,
                                       {.debug_checks = true}));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TrainedModel b,
                               DpTrain(e.train, e.map, config, std::nullopt, &e.validation));
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
  EXPECT_EQ(a.stats.steps, config.steps());
  EXPECT_LE(a.stats.max_clipped_norm, config.clip_norm * (1 + 1e-12));
  EXPECT_GT(a.validation_accuracy, 0.7);
  EXPECT_GT(a.epsilon_spent, 0.0);
  config.seed = 6;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TrainedModel c,
                               DpTrain(e.train, e.map, config, std::nullopt, nullptr));
  EXPECT_NE(a.model.parameters(), c.model.parameters());
  EXPECT_TRUE(std::isnan(c.validation_accuracy));
}

TEST(DpTrainTest, EnforcesBudget) {
  Encoded e = MakeEncoded(2, 400);
  DpSgdConfig config = SmallConfig(400);
  config.noise_multiplier = 0.5;
  auto result = DpTrain(e.train, e.map, config, PrivacyBudget{.epsilon = 1.0, .delta = 1e-5});
  EXPECT_EQ(result.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(result.status().message(), HasSubstr("not calibrated"));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(double z, ComputeNoise(400, 50, 3, {.epsilon = 1.0, .delta = 1e-5}));
  config.noise_multiplier = z;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(
      TrainedModel ok, DpTrain(e.train, e.map, config, PrivacyBudget{.epsilon = 1.0, .delta = 1e-5}));
  EXPECT_LE(ok.epsilon_spent, 1.0);
}

TEST(DpTrainTest, ReportsDivergence) {
  Encoded e = MakeEncoded(3, 200);
  DpSgdConfig config = SmallConfig(200);
  config.noise_multiplier = 0.0;
  config.learning_rate = 1e300;
  config.clip_norm = 1e10;
  auto result = DpTrain(e.train, e.map, config, std::nullopt);
  EXPECT_EQ(result.status().code(), absl::StatusCode::kInternal);
  EXPECT_THAT(result.status().message(), HasSubstr("diverged"));
}

TEST(DpTrainTest, RejectsMismatchedSize) {
  Encoded e = MakeEncoded(4, 200);
  EXPECT_EQ(DpTrain(e.train, e.map, SmallConfig(199), std::nullopt).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(TrainSgdTest, AnnealingChangesResultAndLearns) {
  Encoded e = MakeEncoded(5, 800);
  const std::vector<int> hidden = {8};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(
      MlpModel init,
      MlpModel::Initialize(MakeArchitecture(static_cast<int>(e.train.features.cols()), hidden,
                                            2),
                           1));
  SgdOptions options{.batch_size = 32, .epochs = 10, .learning_rate = 0.2};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(MlpModel flat, TrainSgd(init, e.train, options, 2));
  options.final_learning_rate_fraction = 0.05;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(MlpModel annealed, TrainSgd(init, e.train, options, 2));
  EXPECT_NE(flat.parameters(), annealed.parameters());
  DPSYNTH_ASSERT_OK_AND_ASSIGN(double acc, Accuracy(annealed, e.validation));
  EXPECT_GT(acc, 0.75);
  options.final_learning_rate_fraction = -0.1;
  EXPECT_FALSE(TrainSgd(init, e.train, options, 2).ok());
}

TEST(CalibrationTest, ClipNormIsWarmupMedian) {
  Encoded e = MakeEncoded(6, 500);
  const std::vector<int> hidden = {8};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(std::vector<double> norms,
                               WarmupGradientNorms(e.train, hidden, 50, 0.1, 1, 3));
  ASSERT_FALSE(norms.empty());
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median =
      n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(double c, CalibrateClipNorm(e.train, hidden, 50, 0.1, 1, 3));
  EXPECT_DOUBLE_EQ(c, median);
  EXPECT_FALSE(CalibrateClipNorm(e.train, hidden, 50, 0.1, 0, 3).ok());
}

TEST(TuningTest, PicksGridPoint) {
  Encoded e = MakeEncoded(7, 600);
  const std::vector<int> hidden = {8};
  HyperGrid grid{.batch_sizes = {32, 64}, .epochs = {2, 4}, .learning_rates = {0.05, 0.2}};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TunedHyperparameters t,
                               TuneHyperparameters(e.train, e.validation, grid, hidden, 1));
  EXPECT_THAT(grid.batch_sizes, ::testing::Contains(t.batch_size));
  EXPECT_THAT(grid.epochs, ::testing::Contains(t.epochs));
  EXPECT_THAT(grid.learning_rates, ::testing::Contains(t.learning_rate));
  EXPECT_GT(t.clip_norm, 0.0);
  EXPECT_GT(t.validation_accuracy, 0.6);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(TunedHyperparameters again,
                               TuneHyperparameters(e.train, e.validation, grid, hidden, 1));
  EXPECT_EQ(again.batch_size, t.batch_size);
  EXPECT_EQ(again.clip_norm, t.clip_norm);
  grid.epochs.clear();
  EXPECT_FALSE(TuneHyperparameters(e.train, e.validation, grid, hidden, 1).ok());
}

}  // namespace
}  // namespace dpsynth
