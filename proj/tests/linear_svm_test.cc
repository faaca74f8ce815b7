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

#include "dpsynth/linear_svm.h"

#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsynth {
namespace {

TEST(LinearSvmTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  RowMatrix x(20, 3);
  std::vector<double> y(20);
  for (Eigen::Index i = 0; i < 20; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) x(i, k) = normal(rng);
    y[i] = i % 2 == 0 ? 1.0 : -1.0;
  }
  LinearSvm svm{.weights = Eigen::Vector3d(0.3, -0.2, 0.1), .bias = 0.05};
  constexpr double kLambda = 0.01;
  constexpr double kStep = 1e-7;
  Eigen::VectorXd g = HingeGradient(svm, x, y, kLambda);
  ASSERT_EQ(g.size(), 4);
  for (int p = 0; p < 4; ++p) {
    LinearSvm plus = svm;
    LinearSvm minus = svm;
    if (p < 3) {
      plus.weights[p] += kStep;
      minus.weights[p] -= kStep;
    } else {
      plus.bias += kStep;
      minus.bias -= kStep;
    }
    const double numeric =
        (HingeObjective(plus, x, y, kLambda) - HingeObjective(minus, x, y, kLambda)) /
        (2 * kStep);
    EXPECT_NEAR(g[p], numeric, 1e-6) << p;
  }
}

TEST(LinearSvmTest, SeparatesSeparableData) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  RowMatrix x(200, 2);
  std::vector<double> y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    x(i, 0) = unit(rng);
    x(i, 1) = unit(rng);
    const double s = x(i, 0) + 2 * x(i, 1) - 0.2;
    if (std::abs(s) < 0.1) x(i, 1) += s > 0 ? 0.1 : -0.1;
    y[i] = x(i, 0) + 2 * x(i, 1) - 0.2 > 0 ? 1.0 : -1.0;
  }
  LinearSvmOptions options{.lambda = 1e-4, .eta0 = 0.5, .epochs = 50};
  DPSYNTH_ASSERT_OK_AND_ASSIGN(LinearSvm svm, TrainLinearSvm(x, y, options, 9));
  int errors = 0;
  for (Eigen::Index i = 0; i < 200; ++i) {
    if ((svm.Score(x.row(i).transpose()) > 0) != (y[i] > 0)) ++errors;
  }
  EXPECT_LE(errors, 2);
}

TEST(LinearSvmTest, DeterministicForSeed) {
  RowMatrix x(100, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> y(100);
  for (Eigen::Index i = 0; i < 100; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) x(i, k) = normal(rng);
    y[i] = x(i, 0) > 0 ? 1.0 : -1.0;
  }
  LinearSvmOptions options;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(LinearSvm a, TrainLinearSvm(x, y, options, 3));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(LinearSvm b, TrainLinearSvm(x, y, options, 3));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(LinearSvm c, TrainLinearSvm(x, y, options, 4));
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_NE(a.weights, c.weights);
  options.average = false;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(LinearSvm last, TrainLinearSvm(x, y, options, 3));
  EXPECT_NE(a.weights, last.weights);
}

TEST(LinearSvmTest, RejectsBadInput) {
  RowMatrix x = RowMatrix::Zero(2, 2);
  std::vector<double> y = {1.0, 0.0};
  EXPECT_FALSE(TrainLinearSvm(x, y, {}, 1).ok());
  y = {1.0};
  EXPECT_FALSE(TrainLinearSvm(x, y, {}, 1).ok());
  y = {1.0, -1.0};
  EXPECT_FALSE(TrainLinearSvm(x, y, {.lambda = 0.0}, 1).ok());
  EXPECT_FALSE(TrainLinearSvm(x, y, {.epochs = 0}, 1).ok());
  EXPECT_TRUE(TrainLinearSvm(x, y, {}, 1).ok());
}

}  // namespace
}  // namespace dpsynth
