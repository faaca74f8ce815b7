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

#include "dpsynth/mlp.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace dpsynth {
namespace {

MlpModel SmallModel(std::uint64_t seed) {
  const std::vector<int> hidden = {6, 5};
  auto model = MlpModel::Initialize(MakeArchitecture(4, hidden, 3), seed);
  EXPECT_TRUE(model.ok());
  return *std::move(model);
}

TEST(MlpTest, ArchitectureAndLayout) {
  const std::vector<int> hidden = {8};
  std::vector<LayerSpec> layers = MakeArchitecture(5, hidden, 2);
  ASSERT_EQ(layers.size(), 2u);
  EXPECT_EQ(layers[0].activation, Activation::kRelu);
  EXPECT_EQ(layers[1].activation, Activation::kIdentity);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(MlpModel model, MlpModel::Initialize(layers, 1));
  EXPECT_EQ(model.num_parameters(), 8u * 6 + 2u * 9);
  EXPECT_EQ(model.weight_offset(0), 0u);
  EXPECT_EQ(model.bias_offset(0), 40u);
  EXPECT_EQ(model.weight_offset(1), 48u);
  EXPECT_EQ(model.bias_offset(1), 64u);
  EXPECT_EQ(model.weight(0)(2, 3), model.parameters()[2 * 5 + 3]);
  EXPECT_EQ(model.bias(1)[1], model.parameters()[65]);
}

TEST(MlpTest, InitializationBoundsAndZeroBias) {
  MlpModel model = SmallModel(7);
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    const double bound = 1.0 / std::sqrt(model.layers()[l].input_dim);
    EXPECT_LE(model.weight(l).cwiseAbs().maxCoeff(), bound);
    EXPECT_EQ(model.bias(l).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(SmallModel(7).parameters(), model.parameters());
  EXPECT_NE(SmallModel(8).parameters(), model.parameters());
}

TEST(MlpTest, CreateRejectsBadShapes) {
  std::vector<LayerSpec> layers = {{.input_dim = 3, .output_dim = 2}};
  EXPECT_FALSE(MlpModel::Create(layers, Eigen::VectorXd::Zero(7)).ok());
  EXPECT_TRUE(MlpModel::Create(layers, Eigen::VectorXd::Zero(8)).ok());
  std::vector<LayerSpec> one_class = {{.input_dim = 3, .output_dim = 1}};
  EXPECT_FALSE(MlpModel::Create(one_class, Eigen::VectorXd::Zero(4)).ok());
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(8);
  bad[0] = std::nan("");
  EXPECT_FALSE(MlpModel::Create(layers, bad).ok());
}

TEST(MlpTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  constexpr double kStep = 1e-6;
  int checked = 0;
  for (int instance = 0; instance < 50; ++instance) {
    MlpModel model = SmallModel(100 + instance);
    // Bias shifts keep ReLU pre-activations away from their kink.
    for (double& p : model.mutable_parameters()) p += 0.05 * normal(rng);
    Eigen::VectorXd x(4);
    for (int k = 0; k < 4; ++k) x[k] = normal(rng);
    const int label = instance % 3;
    DPSYNTH_ASSERT_OK_AND_ASSIGN(PerExampleGradient g,
                                 ComputePerExampleGradient(model, x, label));
    ASSERT_EQ(g.values.size(), static_cast<Eigen::Index>(model.num_parameters()));
    for (Eigen::Index p = 0; p < g.values.size(); ++p) {
      MlpModel plus = model;
      MlpModel minus = model;
      plus.mutable_parameters()[p] += kStep;
      minus.mutable_parameters()[p] -= kStep;
      DPSYNTH_ASSERT_OK_AND_ASSIGN(Eigen::VectorXd lp, Forward(plus, x));
      DPSYNTH_ASSERT_OK_AND_ASSIGN(Eigen::VectorXd lm, Forward(minus, x));
      DPSYNTH_ASSERT_OK_AND_ASSIGN(double fp, CrossEntropyLoss(lp, label));
      DPSYNTH_ASSERT_OK_AND_ASSIGN(double fm, CrossEntropyLoss(lm, label));
      const double numeric = (fp - fm) / (2 * kStep);
      EXPECT_NEAR(g.values[p], numeric, 1e-5 + 1e-4 * std::abs(numeric))
          << "instance " << instance << " parameter " << p;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(MlpTest, BatchGradientsMatchSingleExample) {
  MlpModel model = SmallModel(3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  RowMatrix x(6, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  const std::vector<int> labels = {0, 1, 2, 2, 1, 0};
  std::vector<double> losses;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(RowMatrix grads, PerExampleGradients(model, x, labels, &losses));
  ASSERT_EQ(grads.rows(), 6);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(grads.cols());
  double loss_sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    DPSYNTH_ASSERT_OK_AND_ASSIGN(PerExampleGradient g,
                                 ComputePerExampleGradient(model, x.row(i).transpose(), labels[i]));
    EXPECT_LT((grads.row(i).transpose() - g.values).cwiseAbs().maxCoeff(), 1e-12);
    sum += g.values;
    loss_sum += losses[i];
  }
  double mean_loss = 0.0;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Eigen::VectorXd mean, MeanGradient(model, x, labels, &mean_loss));
  EXPECT_LT((mean - sum / 6.0).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(mean_loss, loss_sum / 6.0, 1e-12);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(RowMatrix logits, ForwardBatch(model, x));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(Eigen::VectorXd single, Forward(model, x.row(4).transpose()));
  EXPECT_LT((logits.row(4).transpose() - single).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MlpTest, CrossEntropyIsStable) {
  Eigen::VectorXd logits(3);
  logits << 1000.0, -1000.0, 0.0;
  DPSYNTH_ASSERT_OK_AND_ASSIGN(double low, CrossEntropyLoss(logits, 0));
  DPSYNTH_ASSERT_OK_AND_ASSIGN(double high, CrossEntropyLoss(logits, 1));
  EXPECT_EQ(low, 0.0);
  EXPECT_NEAR(high, 2000.0, 1e-9);
  Eigen::VectorXd p = Softmax(logits);
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p.sum(), 1.0, 1e-15);
  Eigen::VectorXd even = Eigen::VectorXd::Zero(4);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(double uniform, CrossEntropyLoss(even, 2));
  EXPECT_NEAR(uniform, std::log(4.0), 1e-15);
  EXPECT_EQ(CrossEntropyLoss(even, 4).status().code(), absl::StatusCode::kOutOfRange);
}

TEST(MlpTest, ArgMaxBreaksTiesTowardLowestIndex) {
  Eigen::VectorXd logits(4);
  logits << 0.5, 2.0, 2.0, -1.0;
  EXPECT_EQ(ArgMax(logits), 1);
  EXPECT_EQ(ArgMax(Eigen::VectorXd::Zero(3)), 0);
}

TEST(MlpTest, PredictRejectsWrongWidth) {
  MlpModel model = SmallModel(1);
  EXPECT_EQ(Predict(model, Eigen::VectorXd::Zero(3)).status().code(),
            absl::StatusCode::kInvalidArgument);
  DPSYNTH_ASSERT_OK_AND_ASSIGN(std::vector<int> labels,
                               PredictBatch(model, RowMatrix::Zero(2, 4)));
  EXPECT_EQ(labels.size(), 2u);
}

}  // namespace
}  // namespace dpsynth
