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

#include "run_config.h"

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <type_traits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsynth/checkpoint.h"
#include "dpsynth/schema_io.h"
#include "dpsynth/status_macros.h"
#include "json.hpp"

namespace dpsynth::cli {
namespace {

using Json = nlohmann::ordered_json;

template <typename T>
struct IsVector : std::false_type {};
template <typename T>
struct IsVector<std::vector<T>> : std::true_type {};

template <typename T>
absl::StatusOr<T> Convert(const Json& j, const std::string& where) {
  auto type_error = [&](const char* expected) {
    return absl::InvalidArgumentError(absl::StrCat(where, ": expected ", expected));
  };
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) return type_error("a boolean");
    return j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) return type_error("a string");
    return j.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!j.is_number()) return type_error("a number");
    return j.get<double>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) return type_error("a non-negative integer");
    return j.get<T>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) return type_error("an integer");
    return j.get<T>();
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    if (j.is_null()) return std::optional<double>();
    if (!j.is_number()) return type_error("a number or null");
    return std::optional<double>(j.get<double>());
  } else {
    static_assert(IsVector<T>::value);
    if (!j.is_array()) return type_error("an array");
    T out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      ASSIGN_OR_RETURN(auto v, Convert<typename T::value_type>(
                                   j[i], absl::StrCat(where, "[", i, "]")));
      out.push_back(std::move(v));
    }
    return out;
  }
}

// Reads the keys of one JSON object, rejecting any it does not know.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string where)
      : object_(object), where_(std::move(where)) {}

  absl::Status Expect(std::initializer_list<std::string_view> keys) const {
    if (!object_.is_object()) {
      return absl::InvalidArgumentError(absl::StrCat(Name(), ": expected an object"));
    }
    for (const auto& [key, value] : object_.items()) {
      bool known = false;
      for (std::string_view k : keys) known = known || k == key;
      if (!known) {
        return absl::InvalidArgumentError(absl::StrCat(Name(), ": unknown key '", key, "'"));
      }
    }
    return absl::OkStatus();
  }

  template <typename T>
  absl::Status Read(const char* key, T& out) const {
    auto it = object_.find(key);
    if (it == object_.end()) return absl::OkStatus();
    ASSIGN_OR_RETURN(out, Convert<T>(*it, Path(key)));
    return absl::OkStatus();
  }

  const Json* Child(const char* key) const {
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  std::string Name() const { return where_.empty() ? "config" : where_; }

  std::string Path(const char* key) const {
    return where_.empty() ? key : absl::StrCat(where_, ".", key);
  }

 private:
  const Json& object_;
  std::string where_;
};

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

absl::Status ReadTrainer(const Json& j, TrainerSettings& t) {
  ObjectReader r(j, "trainer");
  RETURN_IF_ERROR(r.Expect({"batch_size", "epochs", "learning_rate", "clip_norm",
                            "noise_multiplier", "hidden_layers", "tune", "warmup_epochs",
                            "grid"}));
  RETURN_IF_ERROR(r.Read("batch_size", t.batch_size));
  RETURN_IF_ERROR(r.Read("epochs", t.epochs));
  RETURN_IF_ERROR(r.Read("learning_rate", t.learning_rate));
  RETURN_IF_ERROR(r.Read("clip_norm", t.clip_norm));
  RETURN_IF_ERROR(r.Read("noise_multiplier", t.noise_multiplier));
  RETURN_IF_ERROR(r.Read("hidden_layers", t.hidden_layers));
  RETURN_IF_ERROR(r.Read("tune", t.tune));
  RETURN_IF_ERROR(r.Read("warmup_epochs", t.warmup_epochs));
  if (const Json* grid = r.Child("grid")) {
    ObjectReader g(*grid, "trainer.grid");
    RETURN_IF_ERROR(g.Expect({"batch_sizes", "epochs", "learning_rates"}));
    RETURN_IF_ERROR(g.Read("batch_sizes", t.grid.batch_sizes));
    RETURN_IF_ERROR(g.Read("epochs", t.grid.epochs));
    RETURN_IF_ERROR(g.Read("learning_rates", t.grid.learning_rates));
  }
  return absl::OkStatus();
}

absl::Status ReadDownstream(const Json& j, DownstreamOptions& d) {
  ObjectReader r(j, "downstream");
  RETURN_IF_ERROR(r.Expect({"mlp", "linear_svm"}));
  if (const Json* mlp = r.Child("mlp")) {
    ObjectReader m(*mlp, "downstream.mlp");
    RETURN_IF_ERROR(m.Expect({"hidden_layers", "batch_size", "epochs", "learning_rate",
                              "final_learning_rate_fraction"}));
    RETURN_IF_ERROR(m.Read("hidden_layers", d.mlp_hidden));
    RETURN_IF_ERROR(m.Read("batch_size", d.mlp_sgd.batch_size));
    RETURN_IF_ERROR(m.Read("epochs", d.mlp_sgd.epochs));
    RETURN_IF_ERROR(m.Read("learning_rate", d.mlp_sgd.learning_rate));
    RETURN_IF_ERROR(
        m.Read("final_learning_rate_fraction", d.mlp_sgd.final_learning_rate_fraction));
  }
  if (const Json* svm = r.Child("linear_svm")) {
    ObjectReader s(*svm, "downstream.linear_svm");
    RETURN_IF_ERROR(s.Expect({"lambda", "eta0", "epochs", "average"}));
    RETURN_IF_ERROR(s.Read("lambda", d.svm.lambda));
    RETURN_IF_ERROR(s.Read("eta0", d.svm.eta0));
    RETURN_IF_ERROR(s.Read("epochs", d.svm.epochs));
    RETURN_IF_ERROR(s.Read("average", d.svm.average));
  }
  return absl::OkStatus();
}

}  // namespace

std::string RunConfig::ResolvedDatasetId() const {
  if (!dataset_id.empty()) return dataset_id;
  return std::filesystem::path(dataset).stem().string();
}

absl::StatusOr<RunConfig> ParseRunConfig(std::string_view json, RunConfig base) {
  Json j;
  try {
    j = Json::parse(json);
  } catch (const nlohmann::json::parse_error& e) {
    return absl::InvalidArgumentError(absl::StrCat("config: ", e.what()));
  }
  RunConfig c = std::move(base);
  ObjectReader r(j, "");
  RETURN_IF_ERROR(r.Expect({"dataset", "dataset_id", "schema", "label", "budget", "seed",
                            "preprocess", "trainer", "eval", "downstream", "output_dir"}));
  RETURN_IF_ERROR(r.Read("dataset", c.dataset));
  RETURN_IF_ERROR(r.Read("dataset_id", c.dataset_id));
  RETURN_IF_ERROR(r.Read("schema", c.schema));
  RETURN_IF_ERROR(r.Read("label", c.label));
  RETURN_IF_ERROR(r.Read("seed", c.seed));
  RETURN_IF_ERROR(r.Read("output_dir", c.output_dir));
  if (const Json* budget = r.Child("budget")) {
    ObjectReader b(*budget, "budget");
    RETURN_IF_ERROR(b.Expect({"epsilon", "delta"}));
    RETURN_IF_ERROR(b.Read("epsilon", c.budget.epsilon));
    RETURN_IF_ERROR(b.Read("delta", c.budget.delta));
  }
  if (const Json* pre = r.Child("preprocess")) {
    ObjectReader p(*pre, "preprocess");
    RETURN_IF_ERROR(p.Expect({"drop_null_rows", "drop_constant_attributes", "floor_numerical"}));
    RETURN_IF_ERROR(p.Read("drop_null_rows", c.preprocess.drop_null_rows));
    RETURN_IF_ERROR(p.Read("drop_constant_attributes", c.preprocess.drop_constant_attributes));
    RETURN_IF_ERROR(p.Read("floor_numerical", c.preprocess.floor_numerical));
  }
  if (const Json* t = r.Child("trainer")) RETURN_IF_ERROR(ReadTrainer(*t, c.trainer));
  if (const Json* ev = r.Child("eval")) {
    ObjectReader e(*ev, "eval");
    RETURN_IF_ERROR(e.Expect({"models", "repeats", "include_baseline", "timeout_s",
                              "record_runtime", "scale_factors"}));
    std::vector<std::string> models;
    bool has_models = e.Child("models") != nullptr;
    RETURN_IF_ERROR(e.Read("models", models));
    if (has_models) {
      c.models.clear();
      for (const std::string& m : models) {
        ASSIGN_OR_RETURN(DownstreamModelKind kind, ParseDownstreamModelKind(m));
        c.models.push_back(kind);
      }
    }
    RETURN_IF_ERROR(e.Read("repeats", c.repeats));
    RETURN_IF_ERROR(e.Read("include_baseline", c.include_baseline));
    RETURN_IF_ERROR(e.Read("timeout_s", c.timeout_s));
    RETURN_IF_ERROR(e.Read("record_runtime", c.record_runtime));
    RETURN_IF_ERROR(e.Read("scale_factors", c.scale_factors));
  }
  if (const Json* d = r.Child("downstream")) RETURN_IF_ERROR(ReadDownstream(*d, c.downstream));
  RETURN_IF_ERROR(ValidateRunConfig(c));
  return c;
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  auto config = ParseRunConfig(text);
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

absl::Status ValidateRunConfig(const RunConfig& c) {
  RETURN_IF_ERROR(c.budget.Validate());
  const TrainerSettings& t = c.trainer;
  if (t.batch_size < 1 || t.epochs < 1 || !(t.learning_rate > 0) || t.warmup_epochs < 1) {
    return absl::InvalidArgumentError(
        "trainer: batch_size, epochs, learning_rate and warmup_epochs must be positive");
  }
  if (t.clip_norm && !(*t.clip_norm > 0)) {
    return absl::InvalidArgumentError("trainer.clip_norm must be positive");
  }
  if (t.noise_multiplier && !(*t.noise_multiplier >= 0)) {
    return absl::InvalidArgumentError("trainer.noise_multiplier must be non-negative");
  }
  for (int h : t.hidden_layers) {
    if (h < 1) return absl::InvalidArgumentError("trainer.hidden_layers must be positive");
  }
  if (t.grid.batch_sizes.empty() || t.grid.epochs.empty() || t.grid.learning_rates.empty()) {
    return absl::InvalidArgumentError("trainer.grid lists must be non-empty");
  }
  if (c.models.empty()) return absl::InvalidArgumentError("eval.models must be non-empty");
  if (c.repeats < 1) return absl::InvalidArgumentError("eval.repeats must be >= 1");
  if (!(c.timeout_s > 0)) return absl::InvalidArgumentError("eval.timeout_s must be positive");
  for (std::size_t f : c.scale_factors) {
    if (f < 1 || f > 3) {
      return absl::InvalidArgumentError(
          absl::StrCat("eval.scale_factors: ", f, " is not in {1,2,3}"));
    }
  }
  for (int h : c.downstream.mlp_hidden) {
    if (h < 1) {
      return absl::InvalidArgumentError("downstream.mlp.hidden_layers must be positive");
    }
  }
  if (c.output_dir.empty()) return absl::InvalidArgumentError("output_dir must be set");
  return absl::OkStatus();
}

std::string RunConfigToJson(const RunConfig& c) {
  Json j = Json::object();
  j["dataset"] = c.dataset;
  j["dataset_id"] = c.ResolvedDatasetId();
  j["schema"] = c.schema;
  j["label"] = c.label;
  j["budget"] = Json{{"epsilon", c.budget.epsilon}, {"delta", c.budget.delta}};
  j["seed"] = c.seed;
  j["preprocess"] = Json{{"drop_null_rows", c.preprocess.drop_null_rows},
                         {"drop_constant_attributes", c.preprocess.drop_constant_attributes},
                         {"floor_numerical", c.preprocess.floor_numerical}};
  const TrainerSettings& t = c.trainer;
  j["trainer"] = Json{{"batch_size", t.batch_size},
                      {"epochs", t.epochs},
                      {"learning_rate", t.learning_rate},
                      {"clip_norm", OptionalNumber(t.clip_norm)},
                      {"noise_multiplier", OptionalNumber(t.noise_multiplier)},
                      {"hidden_layers", t.hidden_layers},
                      {"tune", t.tune},
                      {"warmup_epochs", t.warmup_epochs},
                      {"grid", Json{{"batch_sizes", t.grid.batch_sizes},
                                    {"epochs", t.grid.epochs},
                                    {"learning_rates", t.grid.learning_rates}}}};
  Json models = Json::array();
  for (DownstreamModelKind k : c.models) models.push_back(DownstreamModelKindName(k));
  j["eval"] = Json{{"models", models},
                   {"repeats", c.repeats},
                   {"include_baseline", c.include_baseline},
                   {"timeout_s", c.timeout_s},
                   {"record_runtime", c.record_runtime},
                   {"scale_factors", c.scale_factors}};
  const DownstreamOptions& d = c.downstream;
  j["downstream"] =
      Json{{"mlp", Json{{"hidden_layers", d.mlp_hidden},
                        {"batch_size", d.mlp_sgd.batch_size},
                        {"epochs", d.mlp_sgd.epochs},
                        {"learning_rate", d.mlp_sgd.learning_rate},
                        {"final_learning_rate_fraction", d.mlp_sgd.final_learning_rate_fraction}}},
           {"linear_svm", Json{{"lambda", d.svm.lambda},
                               {"eta0", d.svm.eta0},
                               {"epochs", d.svm.epochs},
                               {"average", d.svm.average}}}};
  j["output_dir"] = c.output_dir;
  return j.dump(2) + "\n";
}

std::string ConfigHash(const RunConfig& config) {
  RunConfig c = config;
  c.output_dir.clear();
  return ContentId(RunConfigToJson(c));
}

BenchmarkOptions ToBenchmarkOptions(const RunConfig& c) {
  return BenchmarkOptions{.budget = c.budget,
                          .kinds = c.models,
                          .repeats = c.repeats,
                          .seed = c.seed,
                          .trainer = c.trainer,
                          .downstream = c.downstream,
                          .include_baseline = c.include_baseline,
                          .timeout_seconds = c.timeout_s,
                          .record_runtime = c.record_runtime};
}

}  // namespace dpsynth::cli
