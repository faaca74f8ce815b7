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

#include "dpsynth/checkpoint.h"

#include <cmath>
#include <cstdint>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpsynth/schema_io.h"
#include "dpsynth/status_macros.h"
#include "json_util.h"

namespace dpsynth {
namespace {

using json_util::CheckKeys;
using json_util::Get;
using json_util::Json;

// JSON has no infinity or NaN; both serialize as null and are restored from
// the field's meaning.
Json FiniteOrNull(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

absl::StatusOr<double> NumberOr(const Json& object, std::string_view key, double fallback) {
  if (object.contains(key) && object[std::string(key)].is_null()) return fallback;
  return Get<double>(object, key);
}

}  // namespace

std::string CheckpointToJson(const TrainedModel& m, std::string_view config_hash) {
  Json j;
  j["format"] = "dpsynth-model";
  j["version"] = kCheckpointVersion;
  Json layers = Json::array();
  for (const auto& l : m.model.layers()) {
    layers.push_back({{"input_dim", l.input_dim},
                      {"output_dim", l.output_dim},
                      {"activation", l.activation == Activation::kRelu ? "relu" : "identity"}});
  }
  j["layers"] = std::move(layers);
  const Eigen::VectorXd& p = m.model.parameters();
  j["parameters"] = std::vector<double>(p.data(), p.data() + p.size());
  j["encoding"] = json_util::EncodingToJsonValue(m.encoding);
  const DpSgdConfig& c = m.config;
  j["provenance"] = {
      {"epsilon", FiniteOrNull(m.budget.epsilon)},
      {"delta", m.budget.delta},
      {"epsilon_spent", FiniteOrNull(m.epsilon_spent)},
      {"noise_multiplier", c.noise_multiplier},
      {"num_examples", c.num_examples},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"clip_norm", c.clip_norm},
      {"seed", c.seed},
      {"hidden_layers", c.hidden_layers},
      {"steps", c.steps()},
      {"noise_placement", kNoisePlacement},
      {"batch_sampling", kBatchSampling},
      {"validation_accuracy", FiniteOrNull(m.validation_accuracy)},
      {"config_hash", std::string(config_hash)},
  };
  j["stats"] = {
      {"steps", m.stats.steps},
      {"empty_batches", m.stats.empty_batches},
      {"examples_seen", m.stats.examples_seen},
      {"final_batch_loss", FiniteOrNull(m.stats.final_batch_loss)},
      {"max_clipped_norm", m.stats.max_clipped_norm},
  };
  return j.dump(1) + "\n";
}

absl::StatusOr<TrainedModel> CheckpointFromJson(std::string_view text,
                                                std::string* config_hash) {
  ASSIGN_OR_RETURN(Json j, json_util::Parse(text, "checkpoint"));
  RETURN_IF_ERROR(CheckKeys(j, "checkpoint",
                            {"format", "version", "layers", "parameters", "encoding",
                             "provenance", "stats"}));
  ASSIGN_OR_RETURN(std::string format, Get<std::string>(j, "format"));
  ASSIGN_OR_RETURN(int version, Get<int>(j, "version"));
  if (format != "dpsynth-model" || version != kCheckpointVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported checkpoint format '", format, "' v", version));
  }
  std::vector<LayerSpec> layers;
  for (const auto& l : j["layers"]) {
    RETURN_IF_ERROR(CheckKeys(l, "layer", {"input_dim", "output_dim", "activation"}));
    LayerSpec spec;
    ASSIGN_OR_RETURN(spec.input_dim, Get<int>(l, "input_dim"));
    ASSIGN_OR_RETURN(spec.output_dim, Get<int>(l, "output_dim"));
    ASSIGN_OR_RETURN(std::string act, Get<std::string>(l, "activation"));
    if (act == "relu") {
      spec.activation = Activation::kRelu;
    } else if (act == "identity") {
      spec.activation = Activation::kIdentity;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown activation '", act, "'"));
    }
    layers.push_back(spec);
  }
  ASSIGN_OR_RETURN(std::vector<double> params, Get<std::vector<double>>(j, "parameters"));
  ASSIGN_OR_RETURN(
      MlpModel model,
      MlpModel::Create(std::move(layers),
                       Eigen::Map<const Eigen::VectorXd>(
                           params.data(), static_cast<Eigen::Index>(params.size()))));
  ASSIGN_OR_RETURN(EncodingMap encoding, json_util::EncodingFromJsonValue(j["encoding"]));
  if (static_cast<std::size_t>(model.input_dim()) != encoding.width ||
      static_cast<std::size_t>(model.class_count()) != encoding.class_count()) {
    return absl::InvalidArgumentError("checkpoint model does not match its encoding");
  }

  const Json& p = j["provenance"];
  RETURN_IF_ERROR(CheckKeys(
      p, "provenance",
      {"epsilon", "delta", "epsilon_spent", "noise_multiplier", "num_examples", "batch_size",
       "epochs", "learning_rate", "clip_norm", "seed", "hidden_layers", "steps",
       "noise_placement", "batch_sampling", "validation_accuracy", "config_hash"}));
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  DpSgdConfig config;
  PrivacyBudget budget;
  ASSIGN_OR_RETURN(budget.epsilon, NumberOr(p, "epsilon", kInf));
  ASSIGN_OR_RETURN(budget.delta, Get<double>(p, "delta"));
  ASSIGN_OR_RETURN(double epsilon_spent, NumberOr(p, "epsilon_spent", kInf));
  ASSIGN_OR_RETURN(config.noise_multiplier, Get<double>(p, "noise_multiplier"));
  ASSIGN_OR_RETURN(config.num_examples, Get<std::int64_t>(p, "num_examples"));
  ASSIGN_OR_RETURN(config.batch_size, Get<std::int64_t>(p, "batch_size"));
  ASSIGN_OR_RETURN(config.epochs, Get<int>(p, "epochs"));
  ASSIGN_OR_RETURN(config.learning_rate, Get<double>(p, "learning_rate"));
  ASSIGN_OR_RETURN(config.clip_norm, Get<double>(p, "clip_norm"));
  ASSIGN_OR_RETURN(config.seed, Get<std::uint64_t>(p, "seed"));
  ASSIGN_OR_RETURN(config.hidden_layers, Get<std::vector<int>>(p, "hidden_layers"));
  ASSIGN_OR_RETURN(double validation_accuracy, NumberOr(p, "validation_accuracy", kNaN));
  if (config_hash != nullptr) {
    ASSIGN_OR_RETURN(*config_hash, Get<std::string>(p, "config_hash"));
  }
  RETURN_IF_ERROR(config.Validate());

  TrainingStats stats;
  const Json& s = j["stats"];
  ASSIGN_OR_RETURN(stats.steps, Get<std::int64_t>(s, "steps"));
  ASSIGN_OR_RETURN(stats.empty_batches, Get<std::int64_t>(s, "empty_batches"));
  ASSIGN_OR_RETURN(stats.examples_seen, Get<std::int64_t>(s, "examples_seen"));
  ASSIGN_OR_RETURN(stats.final_batch_loss, NumberOr(s, "final_batch_loss", kNaN));
  ASSIGN_OR_RETURN(stats.max_clipped_norm, Get<double>(s, "max_clipped_norm"));

  return TrainedModel{.model = std::move(model),
                      .encoding = std::move(encoding),
                      .config = std::move(config),
                      .budget = budget,
                      .epsilon_spent = epsilon_spent,
                      .validation_accuracy = validation_accuracy,
                      .stats = stats};
}

absl::Status SaveCheckpoint(const TrainedModel& model, const std::string& path,
                            std::string_view config_hash) {
  return WriteFile(path, CheckpointToJson(model, config_hash));
}

absl::StatusOr<TrainedModel> LoadCheckpoint(const std::string& path,
                                            std::string* config_hash) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  auto model = CheckpointFromJson(text, config_hash);
  if (!model.ok()) {
    return absl::Status(model.status().code(),
                        absl::StrCat(path, ": ", model.status().message()));
  }
  return model;
}

std::string ContentId(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

std::string CheckpointId(const TrainedModel& model) {
  return ContentId(CheckpointToJson(model));
}

}  // namespace dpsynth
