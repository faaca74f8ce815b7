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

#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "dpsynth/rng.h"

namespace dpsynth {

double HingeObjective(const LinearSvm& svm, const RowMatrix& x,
                      std::span<const double> targets, double lambda) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double margin = targets[static_cast<std::size_t>(i)] *
                          (x.row(i).dot(svm.weights) + svm.bias);
    loss += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * lambda * svm.weights.squaredNorm() +
         loss / static_cast<double>(x.rows());
}

Eigen::VectorXd HingeGradient(const LinearSvm& svm, const RowMatrix& x,
                              std::span<const double> targets, double lambda) {
  const Eigen::Index m = svm.weights.size();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double y = targets[static_cast<std::size_t>(i)];
    if (y * (x.row(i).dot(svm.weights) + svm.bias) < 1.0) {
      g.head(m) -= y * x.row(i).transpose();
      g[m] -= y;
    }
  }
  g /= static_cast<double>(x.rows());
  g.head(m) += lambda * svm.weights;
  return g;
}

absl::StatusOr<LinearSvm> TrainLinearSvm(const RowMatrix& x,
                                         std::span<const double> targets,
                                         const LinearSvmOptions& options,
                                         std::uint64_t seed) {
  if (x.rows() == 0 || static_cast<std::size_t>(x.rows()) != targets.size()) {
    return absl::InvalidArgumentError("SVM training needs matching, non-empty data");
  }
  for (double y : targets) {
    if (y != 1.0 && y != -1.0) {
      return absl::InvalidArgumentError(absl::StrCat("SVM target must be +1 or -1, got ", y));
    }
  }
  if (!(options.lambda > 0) || !(options.eta0 > 0) || options.epochs < 1) {
    return absl::InvalidArgumentError("SVM options must be positive");
  }
  LinearSvm svm{.weights = Eigen::VectorXd::Zero(x.cols()), .bias = 0.0};
  // w is stored as scale * v so the per-step shrinkage is O(1).
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.cols());
  double scale = 1.0;
  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  double t = 0.0;
  Eigen::VectorXd w_sum = Eigen::VectorXd::Zero(x.cols());
  double b_sum = 0.0;
  double averaged = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const bool accumulate = options.average && (epoch > 0 || options.epochs == 1);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    for (std::size_t idx : order) {
      const auto row = x.row(static_cast<Eigen::Index>(idx));
      const double y = targets[idx];
      const double eta = options.eta0 / (1.0 + options.lambda * options.eta0 * t);
      const double margin = y * (scale * row.dot(v) + svm.bias);
      scale *= 1.0 - eta * options.lambda;
      if (margin < 1.0) {
        v += (eta * y / scale) * row.transpose();
        svm.bias += eta * y;
      }
      if (scale < 1e-9) {
        v *= scale;
        scale = 1.0;
      }
      t += 1.0;
      if (accumulate) {
        w_sum += scale * v;
        b_sum += svm.bias;
        averaged += 1.0;
      }
    }
  }
  svm.weights = scale * v;
  if (averaged > 0) {
    svm.weights = w_sum / averaged;
    svm.bias = b_sum / averaged;
  }
  if (!svm.weights.allFinite() || !std::isfinite(svm.bias)) {
    return absl::InternalError("SVM training diverged");
  }
  return svm;
}

}  // namespace dpsynth
