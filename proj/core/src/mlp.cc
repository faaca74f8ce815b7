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
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsynth/rng.h"
#include "dpsynth/status_macros.h"

namespace dpsynth {
namespace {

absl::Status CheckLabel(int label, int class_count) {
  if (label < 0 || label >= class_count) {
    return absl::OutOfRangeError(absl::StrCat("label ", label, " outside [0, ",
                                              class_count, ")"));
  }
  return absl::OkStatus();
}

absl::Status CheckInputWidth(const MlpModel& model, Eigen::Index width) {
  if (width != model.input_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input has ", width, " features, model expects ", model.input_dim()));
  }
  return absl::OkStatus();
}

void ApplyActivation(Activation a, RowMatrix& z) {
  if (a == Activation::kRelu) z = z.cwiseMax(0.0);
}

}  // namespace

std::vector<LayerSpec> MakeArchitecture(int input_dim, std::span<const int> hidden,
                                        int class_count) {
  std::vector<LayerSpec> layers;
  int in = input_dim;
  for (int width : hidden) {
    layers.push_back({.input_dim = in, .output_dim = width, .activation = Activation::kRelu});
    in = width;
  }
  layers.push_back(
      {.input_dim = in, .output_dim = class_count, .activation = Activation::kIdentity});
  return layers;
}

MlpModel::MlpModel(std::vector<LayerSpec> layers, Eigen::VectorXd parameters)
    : layers_(std::move(layers)), parameters_(std::move(parameters)) {
  std::size_t offset = 0;
  for (const auto& l : layers_) {
    offsets_.push_back(offset);
    offset += l.num_parameters();
  }
}

absl::StatusOr<MlpModel> MlpModel::Create(std::vector<LayerSpec> layers,
                                          Eigen::VectorXd parameters) {
  if (layers.empty()) return absl::InvalidArgumentError("model needs at least one layer");
  std::size_t total = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerSpec& s = layers[l];
    if (s.input_dim <= 0 || s.output_dim <= 0) {
      return absl::InvalidArgumentError(absl::StrCat("layer ", l, " has a zero dimension"));
    }
    if (l > 0 && layers[l - 1].output_dim != s.input_dim) {
      return absl::InvalidArgumentError(absl::StrCat(
          "layer ", l, " input ", s.input_dim, " does not chain with previous output ",
          layers[l - 1].output_dim));
    }
    const bool last = l + 1 == layers.size();
    if (last != (s.activation == Activation::kIdentity)) {
      return absl::InvalidArgumentError(
          "hidden layers must use relu and the output layer identity");
    }
    total += s.num_parameters();
  }
  if (layers.back().output_dim < 2) {
    return absl::InvalidArgumentError("classifier needs at least two classes");
  }
  if (static_cast<std::size_t>(parameters.size()) != total) {
    return absl::InvalidArgumentError(absl::StrCat(
        "architecture has ", total, " parameters, got ", parameters.size()));
  }
  if (!parameters.allFinite()) {
    return absl::InvalidArgumentError("model parameters must be finite");
  }
  return MlpModel(std::move(layers), std::move(parameters));
}

absl::StatusOr<MlpModel> MlpModel::Initialize(std::vector<LayerSpec> layers,
                                              std::uint64_t seed) {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.num_parameters();
  Eigen::VectorXd params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  Rng rng(seed);
  std::size_t offset = 0;
  for (const auto& l : layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.input_dim));
    std::uniform_real_distribution<double> u(-bound, bound);
    const std::size_t weights = static_cast<std::size_t>(l.input_dim) * l.output_dim;
    for (std::size_t k = 0; k < weights; ++k) {
      params[static_cast<Eigen::Index>(offset + k)] = u(rng);
    }
    offset += l.num_parameters();
  }
  return Create(std::move(layers), std::move(params));
}

ConstRowMap MlpModel::weight(std::size_t layer) const {
  const LayerSpec& s = layers_[layer];
  return ConstRowMap(parameters_.data() + offsets_[layer], s.output_dim, s.input_dim);
}

Eigen::Map<const Eigen::VectorXd> MlpModel::bias(std::size_t layer) const {
  return Eigen::Map<const Eigen::VectorXd>(parameters_.data() + bias_offset(layer),
                                           layers_[layer].output_dim);
}

std::size_t MlpModel::bias_offset(std::size_t layer) const {
  const LayerSpec& s = layers_[layer];
  return offsets_[layer] + static_cast<std::size_t>(s.input_dim) * s.output_dim;
}

absl::StatusOr<RowMatrix> ForwardBatch(const MlpModel& model, const RowMatrix& x) {
  RETURN_IF_ERROR(CheckInputWidth(model, x.cols()));
  RowMatrix a = x;
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    RowMatrix z = a * model.weight(l).transpose();
    z.rowwise() += model.bias(l).transpose();
    ApplyActivation(model.layers()[l].activation, z);
    a = std::move(z);
  }
  return a;
}

absl::StatusOr<Eigen::VectorXd> Forward(const MlpModel& model,
                                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  RowMatrix row = x.transpose();
  ASSIGN_OR_RETURN(RowMatrix logits, ForwardBatch(model, row));
  return Eigen::VectorXd(logits.row(0).transpose());
}

Eigen::VectorXd Softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

absl::StatusOr<double> CrossEntropyLoss(const Eigen::Ref<const Eigen::VectorXd>& logits,
                                        int label) {
  RETURN_IF_ERROR(CheckLabel(label, static_cast<int>(logits.size())));
  const double peak = logits.maxCoeff();
  const double lse = peak + std::log((logits.array() - peak).exp().sum());
  return std::max(0.0, lse - logits[label]);
}

absl::StatusOr<RowMatrix> PerExampleGradients(const MlpModel& model,
                                              const RowMatrix& x,
                                              std::span<const int> labels,
                                              std::vector<double>* losses) {
  RETURN_IF_ERROR(CheckInputWidth(model, x.cols()));
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    return absl::InvalidArgumentError("feature rows and labels differ in count");
  }
  for (int y : labels) RETURN_IF_ERROR(CheckLabel(y, model.class_count()));

  const std::size_t depth = model.layers().size();
  const Eigen::Index n = x.rows();
  // inputs[l] is the input of layer l; pre[l] its pre-activation.
  std::vector<RowMatrix> inputs(depth);
  std::vector<RowMatrix> pre(depth);
  inputs[0] = x;
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = inputs[l] * model.weight(l).transpose();
    pre[l].rowwise() += model.bias(l).transpose();
    if (l + 1 < depth) inputs[l + 1] = pre[l].cwiseMax(0.0);
  }

  RowMatrix delta = pre[depth - 1];
  if (losses) losses->assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = delta.row(i);
    const double peak = row.maxCoeff();
    row = (row.array() - peak).exp();
    const double total = row.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    if (losses) {
      (*losses)[static_cast<std::size_t>(i)] =
          std::max(0.0, std::log(total) - (pre[depth - 1](i, y) - peak));
    }
    row /= total;
    row[y] -= 1.0;
  }

  RowMatrix grads(n, static_cast<Eigen::Index>(model.num_parameters()));
  for (std::size_t l = depth; l-- > 0;) {
    const LayerSpec& s = model.layers()[l];
    const std::size_t w_off = model.weight_offset(l);
    const std::size_t b_off = model.bias_offset(l);
    for (Eigen::Index i = 0; i < n; ++i) {
      double* g = grads.row(i).data();
      RowMap(g + w_off, s.output_dim, s.input_dim).noalias() =
          delta.row(i).transpose() * inputs[l].row(i);
      Eigen::Map<Eigen::RowVectorXd>(g + b_off, s.output_dim) = delta.row(i);
    }
    if (l > 0) {
      RowMatrix back = delta * model.weight(l);
      delta = (pre[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return grads;
}

absl::StatusOr<Eigen::VectorXd> MeanGradient(const MlpModel& model, const RowMatrix& x,
                                             std::span<const int> labels,
                                             double* mean_loss) {
  RETURN_IF_ERROR(CheckInputWidth(model, x.cols()));
  if (static_cast<std::size_t>(x.rows()) != labels.size() || x.rows() == 0) {
    return absl::InvalidArgumentError("feature rows and labels differ in count");
  }
  for (int y : labels) RETURN_IF_ERROR(CheckLabel(y, model.class_count()));

  const std::size_t depth = model.layers().size();
  const Eigen::Index n = x.rows();
  std::vector<RowMatrix> inputs(depth);
  std::vector<RowMatrix> pre(depth);
  inputs[0] = x;
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = inputs[l] * model.weight(l).transpose();
    pre[l].rowwise() += model.bias(l).transpose();
    if (l + 1 < depth) inputs[l + 1] = pre[l].cwiseMax(0.0);
  }
  RowMatrix delta = pre[depth - 1];
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto row = delta.row(i);
    const double peak = row.maxCoeff();
    row = (row.array() - peak).exp();
    const double total = row.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    loss += std::max(0.0, std::log(total) - (pre[depth - 1](i, y) - peak));
    row /= total;
    row[y] -= 1.0;
  }
  if (mean_loss) *mean_loss = loss / static_cast<double>(n);

  Eigen::VectorXd grad(static_cast<Eigen::Index>(model.num_parameters()));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t l = depth; l-- > 0;) {
    const LayerSpec& s = model.layers()[l];
    RowMap(grad.data() + model.weight_offset(l), s.output_dim, s.input_dim).noalias() =
        inv_n * (delta.transpose() * inputs[l]);
    Eigen::Map<Eigen::VectorXd>(grad.data() + model.bias_offset(l), s.output_dim) =
        inv_n * delta.colwise().sum().transpose();
    if (l > 0) {
      RowMatrix back = delta * model.weight(l);
      delta = (pre[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return grad;
}

absl::StatusOr<PerExampleGradient> ComputePerExampleGradient(
    const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, int label) {
  RowMatrix row = x.transpose();
  const int labels[] = {label};
  ASSIGN_OR_RETURN(RowMatrix g, PerExampleGradients(model, row, labels));
  return PerExampleGradient{.values = g.row(0).transpose()};
}

int ArgMax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  int best = 0;
  for (Eigen::Index k = 1; k < logits.size(); ++k) {
    if (logits[k] > logits[best]) best = static_cast<int>(k);
  }
  return best;
}

absl::StatusOr<int> Predict(const MlpModel& model,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
  ASSIGN_OR_RETURN(Eigen::VectorXd logits, Forward(model, x));
  return ArgMax(logits);
}

absl::StatusOr<std::vector<int>> PredictBatch(const MlpModel& model, const RowMatrix& x) {
  ASSIGN_OR_RETURN(RowMatrix logits, ForwardBatch(model, x));
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = ArgMax(logits.row(i).transpose());
  }
  return out;
}

}  // namespace dpsynth
