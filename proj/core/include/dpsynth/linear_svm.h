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

#ifndef DPSYNTH_LINEAR_SVM_H_
#define DPSYNTH_LINEAR_SVM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {

struct LinearSvmOptions {
  double lambda = 1e-5;  // L2 regularization strength
  double eta0 = 0.1;      // initial step size
  int epochs = 10;
  // Return the mean iterate of all epochs after the first instead of the last
  // iterate.
  bool average = true;
};

// Binary linear SVM. Targets are +1 (positive class) and -1.
struct LinearSvm {
  Eigen::VectorXd weights;
  double bias = 0.0;

  double Score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return weights.dot(x) + bias;
  }
};

// lambda/2 |w|^2 + mean_i max(0, 1 - y_i (w.x_i + b)).
double HingeObjective(const LinearSvm& svm, const RowMatrix& x,
                      std::span<const double> targets, double lambda);
// Subgradient of HingeObjective with respect to (w, b); the bias component is
// the last entry.
Eigen::VectorXd HingeGradient(const LinearSvm& svm, const RowMatrix& x,
                              std::span<const double> targets, double lambda);

// SGD with step eta0 / (1 + lambda * eta0 * t), examples visited in a seeded
// random order each epoch. The bias is not regularized.
absl::StatusOr<LinearSvm> TrainLinearSvm(const RowMatrix& x,
                                         std::span<const double> targets,
                                         const LinearSvmOptions& options,
                                         std::uint64_t seed);

}  // namespace dpsynth

#endif  // DPSYNTH_LINEAR_SVM_H_
