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

#include "dpsynth/report_io.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpsynth/status_macros.h"
#include "json_util.h"

namespace dpsynth {
namespace {

using json_util::Get;
using json_util::Json;

Json Number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

absl::StatusOr<double> GetNumber(const Json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  if (it != j.end() && it->is_null()) return std::numeric_limits<double>::quiet_NaN();
  return Get<double>(j, key);
}

Json RepeatToJson(const RepeatResult& r) {
  Json j = Json::object();
  j["seed"] = r.seed;
  j["accuracy"] = Number(r.accuracy);
  j["f1"] = Number(r.f1);
  j["collapse"] = r.collapse;
  j["synth_runtime_s"] = Number(r.synth_runtime_s);
  j["train_runtime_s"] = Number(r.train_runtime_s);
  return j;
}

absl::StatusOr<RepeatResult> RepeatFromJson(const Json& j) {
  RETURN_IF_ERROR(json_util::CheckKeys(j, "repeat", {"seed", "accuracy", "f1", "collapse",
                                                     "synth_runtime_s", "train_runtime_s"}));
  RepeatResult r;
  ASSIGN_OR_RETURN(r.seed, Get<std::uint64_t>(j, "seed"));
  ASSIGN_OR_RETURN(r.accuracy, GetNumber(j, "accuracy"));
  ASSIGN_OR_RETURN(r.f1, GetNumber(j, "f1"));
  ASSIGN_OR_RETURN(r.collapse, Get<bool>(j, "collapse"));
  ASSIGN_OR_RETURN(r.synth_runtime_s, GetNumber(j, "synth_runtime_s"));
  ASSIGN_OR_RETURN(r.train_runtime_s, GetNumber(j, "train_runtime_s"));
  return r;
}

Json ReportToJson(const EvalReport& r) {
  Json j = Json::object();
  j["dataset_id"] = r.dataset_id;
  j["synthesizer_id"] = r.synthesizer_id;
  j["model"] = std::string(DownstreamModelKindName(r.model_kind));
  j["scale_factor"] = r.scale_factor;
  j["accuracy"] = Number(r.accuracy);
  j["f1"] = Number(r.f1);
  j["collapse"] = r.collapse;
  j["timed_out"] = r.timed_out;
  j["synth_runtime_s"] = Number(r.synth_runtime_s);
  j["train_runtime_s"] = Number(r.train_runtime_s);
  j["seed"] = r.seed;
  j["repeat_count"] = r.repeat_count;
  if (r.budget) {
    j["budget"] = Json{{"epsilon", Number(r.budget->epsilon)},
                       {"delta", Number(r.budget->delta)}};
  } else {
    j["budget"] = nullptr;
  }
  j["train_rows"] = r.train_rows;
  j["sampling_rate"] = Number(r.sampling_rate);
  j["noise_multiplier"] = Number(r.noise_multiplier);
  j["epsilon_spent"] = Number(r.epsilon_spent);
  j["warnings"] = r.warnings;
  Json repeats = Json::array();
  for (const RepeatResult& rr : r.repeats) repeats.push_back(RepeatToJson(rr));
  j["repeats"] = std::move(repeats);
  j["config_hash"] = r.config_hash;
  return j;
}

absl::StatusOr<EvalReport> ReportFromJson(const Json& j) {
  RETURN_IF_ERROR(json_util::CheckKeys(
      j, "report",
      {"dataset_id", "synthesizer_id", "model", "scale_factor", "accuracy", "f1", "collapse",
       "timed_out", "synth_runtime_s", "train_runtime_s", "seed", "repeat_count", "budget",
       "train_rows", "sampling_rate", "noise_multiplier", "epsilon_spent", "warnings",
       "repeats", "config_hash"}));
  EvalReport r;
  ASSIGN_OR_RETURN(r.dataset_id, Get<std::string>(j, "dataset_id"));
  ASSIGN_OR_RETURN(r.synthesizer_id, Get<std::string>(j, "synthesizer_id"));
  ASSIGN_OR_RETURN(std::string model, Get<std::string>(j, "model"));
  ASSIGN_OR_RETURN(r.model_kind, ParseDownstreamModelKind(model));
  ASSIGN_OR_RETURN(r.scale_factor, Get<std::size_t>(j, "scale_factor"));
  ASSIGN_OR_RETURN(r.accuracy, GetNumber(j, "accuracy"));
  ASSIGN_OR_RETURN(r.f1, GetNumber(j, "f1"));
  ASSIGN_OR_RETURN(r.collapse, Get<bool>(j, "collapse"));
  ASSIGN_OR_RETURN(r.timed_out, Get<bool>(j, "timed_out"));
  ASSIGN_OR_RETURN(r.synth_runtime_s, GetNumber(j, "synth_runtime_s"));
  ASSIGN_OR_RETURN(r.train_runtime_s, GetNumber(j, "train_runtime_s"));
  ASSIGN_OR_RETURN(r.seed, Get<std::uint64_t>(j, "seed"));
  ASSIGN_OR_RETURN(r.repeat_count, Get<int>(j, "repeat_count"));
  const Json& budget = j.at("budget");
  if (!budget.is_null()) {
    RETURN_IF_ERROR(json_util::CheckKeys(budget, "budget", {"epsilon", "delta"}));
    PrivacyBudget b;
    ASSIGN_OR_RETURN(b.epsilon, GetNumber(budget, "epsilon"));
    ASSIGN_OR_RETURN(b.delta, GetNumber(budget, "delta"));
    r.budget = b;
  }
  ASSIGN_OR_RETURN(r.train_rows, Get<std::int64_t>(j, "train_rows"));
  ASSIGN_OR_RETURN(r.sampling_rate, GetNumber(j, "sampling_rate"));
  ASSIGN_OR_RETURN(r.noise_multiplier, GetNumber(j, "noise_multiplier"));
  ASSIGN_OR_RETURN(r.epsilon_spent, GetNumber(j, "epsilon_spent"));
  ASSIGN_OR_RETURN(r.warnings, Get<std::vector<std::string>>(j, "warnings"));
  ASSIGN_OR_RETURN(r.config_hash, Get<std::string>(j, "config_hash"));
  const Json& repeats = j.at("repeats");
  if (!repeats.is_array()) return absl::InvalidArgumentError("'repeats' must be an array");
  for (const Json& rr : repeats) {
    ASSIGN_OR_RETURN(RepeatResult parsed, RepeatFromJson(rr));
    r.repeats.push_back(parsed);
  }
  return r;
}

std::string Cell(double v) { return std::isfinite(v) ? absl::StrFormat("%.4f", v) : ""; }

// Model kinds in first-seen order.
std::vector<DownstreamModelKind> KindsOf(std::span<const EvalReport> reports) {
  std::vector<DownstreamModelKind> kinds;
  for (const EvalReport& r : reports) {
    if (std::find(kinds.begin(), kinds.end(), r.model_kind) == kinds.end()) {
      kinds.push_back(r.model_kind);
    }
  }
  return kinds;
}

}  // namespace

std::string ReportsToJson(std::span<const EvalReport> reports) {
  Json array = Json::array();
  for (const EvalReport& r : reports) array.push_back(ReportToJson(r));
  return array.dump(2) + "\n";
}

absl::StatusOr<std::vector<EvalReport>> ReportsFromJson(std::string_view json) {
  ASSIGN_OR_RETURN(Json j, json_util::Parse(json, "report"));
  if (!j.is_array()) return absl::InvalidArgumentError("report document must be an array");
  std::vector<EvalReport> out;
  for (const Json& item : j) {
    ASSIGN_OR_RETURN(EvalReport r, ReportFromJson(item));
    out.push_back(std::move(r));
  }
  return out;
}

std::string SummaryCsv(std::span<const EvalReport> reports) {
  const std::vector<DownstreamModelKind> kinds = KindsOf(reports);
  std::vector<std::string> header = {"method"};
  for (DownstreamModelKind k : kinds) {
    const std::string name(DownstreamModelKindName(k));
    header.push_back(absl::StrCat(name, "_accuracy"));
    header.push_back(absl::StrCat(name, "_f1"));
    header.push_back(absl::StrCat(name, "_collapse"));
  }
  std::vector<std::string> methods;
  std::map<std::pair<std::string, DownstreamModelKind>, const EvalReport*> cells;
  for (const EvalReport& r : reports) {
    if (std::find(methods.begin(), methods.end(), r.synthesizer_id) == methods.end()) {
      methods.push_back(r.synthesizer_id);
    }
    cells.emplace(std::make_pair(r.synthesizer_id, r.model_kind), &r);
  }
  std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
  for (const std::string& method : methods) {
    std::vector<std::string> row = {method};
    for (DownstreamModelKind k : kinds) {
      auto it = cells.find({method, k});
      if (it == cells.end()) {
        row.insert(row.end(), {"", "", ""});
      } else if (it->second->timed_out) {
        row.insert(row.end(), {"T/O", "T/O", "T/O"});
      } else {
        const EvalReport& r = *it->second;
        row.insert(row.end(), {Cell(r.accuracy), Cell(r.f1), r.collapse ? "true" : "false"});
      }
    }
    absl::StrAppend(&out, absl::StrJoin(row, ","), "\n");
  }
  return out;
}

std::string ScaleCsv(std::span<const EvalReport> reports) {
  std::vector<std::size_t> factors;
  std::vector<std::pair<std::string, DownstreamModelKind>> rows;
  std::map<std::tuple<std::string, DownstreamModelKind, std::size_t>, const EvalReport*> cells;
  for (const EvalReport& r : reports) {
    if (std::find(factors.begin(), factors.end(), r.scale_factor) == factors.end()) {
      factors.push_back(r.scale_factor);
    }
    std::pair<std::string, DownstreamModelKind> key(r.synthesizer_id, r.model_kind);
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    cells.emplace(std::make_tuple(r.synthesizer_id, r.model_kind, r.scale_factor), &r);
  }
  std::sort(factors.begin(), factors.end());
  std::string out = "method,model";
  for (std::size_t f : factors) absl::StrAppend(&out, ",", f, "x");
  out += "\n";
  for (const auto& [method, kind] : rows) {
    absl::StrAppend(&out, method, ",", DownstreamModelKindName(kind));
    for (std::size_t f : factors) {
      auto it = cells.find({method, kind, f});
      out += ",";
      if (it == cells.end()) continue;
      out += it->second->timed_out ? "T/O" : Cell(it->second->accuracy);
    }
    out += "\n";
  }
  return out;
}

}  // namespace dpsynth
