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

#include "dpsynth/schema_io.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dpsynth/status_macros.h"
#include "json_util.h"

namespace dpsynth {
namespace json_util {

absl::Status CheckKeys(const Json& object, std::string_view what,
                       std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional) {
  if (!object.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(std::string(what), " must be a JSON object"));
  }
  std::unordered_set<std::string_view> allowed(required);
  allowed.insert(optional.begin(), optional.end());
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat(std::string(what), ": unknown key '", key, "'"));
    }
  }
  for (std::string_view key : required) {
    if (!object.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat(std::string(what), ": missing key '", std::string(key), "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Json> Parse(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return absl::InvalidArgumentError(absl::StrCat(std::string(what), ": ", e.what()));
  }
}

Json AttributeToJson(const AttributeSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["kind"] = std::string(AttributeKindName(spec.kind));
  if (spec.is_categorical()) {
    j["domain"] = spec.categories;
  } else {
    j["min"] = spec.min;
    j["max"] = spec.max;
  }
  return j;
}

absl::StatusOr<AttributeSpec> AttributeFromJson(const Json& j) {
  AttributeSpec spec;
  ASSIGN_OR_RETURN(spec.name, Get<std::string>(j, "name"));
  ASSIGN_OR_RETURN(std::string kind, Get<std::string>(j, "kind"));
  const std::string what = absl::StrCat("attribute '", spec.name, "'");
  if (kind == "categorical") {
    RETURN_IF_ERROR(CheckKeys(j, what, {"name", "kind", "domain"}));
    spec.kind = AttributeKind::kCategorical;
    ASSIGN_OR_RETURN(spec.categories, Get<std::vector<std::string>>(j, "domain"));
  } else if (kind == "numerical") {
    RETURN_IF_ERROR(CheckKeys(j, what, {"name", "kind", "min", "max"}));
    spec.kind = AttributeKind::kNumerical;
    ASSIGN_OR_RETURN(spec.min, Get<double>(j, "min"));
    ASSIGN_OR_RETURN(spec.max, Get<double>(j, "max"));
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(what), ": unknown kind '", kind, "'"));
  }
  RETURN_IF_ERROR(spec.Validate());
  return spec;
}

Json SchemaToJsonValue(const Schema& schema) {
  Json j;
  j["format"] = "dpsynth-schema";
  j["version"] = 1;
  Json attrs = Json::array();
  for (const auto& a : schema.attributes) attrs.push_back(AttributeToJson(a));
  j["attributes"] = std::move(attrs);
  j["label"] = AttributeToJson(schema.label);
  if (!schema.positive_label.empty()) j["positive_label"] = schema.positive_label;
  return j;
}

absl::StatusOr<Schema> SchemaFromJsonValue(const Json& j) {
  RETURN_IF_ERROR(CheckKeys(j, "schema", {"format", "version", "attributes", "label"},
                            {"positive_label"}));
  ASSIGN_OR_RETURN(std::string format, Get<std::string>(j, "format"));
  ASSIGN_OR_RETURN(int version, Get<int>(j, "version"));
  if (format != "dpsynth-schema" || version != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported schema format '", format, "' v", version));
  }
  Schema schema;
  if (!j["attributes"].is_array()) {
    return absl::InvalidArgumentError("schema: 'attributes' must be an array");
  }
  for (const auto& a : j["attributes"]) {
    ASSIGN_OR_RETURN(AttributeSpec spec, AttributeFromJson(a));
    schema.attributes.push_back(std::move(spec));
  }
  ASSIGN_OR_RETURN(schema.label, AttributeFromJson(j["label"]));
  if (j.contains("positive_label")) {
    ASSIGN_OR_RETURN(schema.positive_label, Get<std::string>(j, "positive_label"));
  }
  RETURN_IF_ERROR(schema.Validate());
  return schema;
}

Json EncodingToJsonValue(const EncodingMap& map) {
  Json j;
  Json attrs = Json::array();
  for (std::size_t k = 0; k < map.attributes.size(); ++k) {
    Json a = AttributeToJson(map.attributes[k]);
    a["offset"] = map.offsets[k];
    attrs.push_back(std::move(a));
  }
  j["attributes"] = std::move(attrs);
  j["width"] = map.width;
  j["label"] = AttributeToJson(map.label);
  if (!map.positive_label.empty()) j["positive_label"] = map.positive_label;
  return j;
}

absl::StatusOr<EncodingMap> EncodingFromJsonValue(const Json& j) {
  RETURN_IF_ERROR(CheckKeys(j, "encoding", {"attributes", "width", "label"},
                            {"positive_label"}));
  EncodingMap map;
  std::size_t expected_offset = 0;
  for (const auto& a : j["attributes"]) {
    Json spec_json = a;
    ASSIGN_OR_RETURN(std::size_t offset, Get<std::size_t>(a, "offset"));
    spec_json.erase("offset");
    ASSIGN_OR_RETURN(AttributeSpec spec, AttributeFromJson(spec_json));
    if (offset != expected_offset) {
      return absl::InvalidArgumentError(absl::StrCat(
          "encoding: attribute '", spec.name, "' has offset ", offset,
          ", expected ", expected_offset));
    }
    expected_offset += spec.is_categorical() ? spec.categories.size() : 1;
    map.offsets.push_back(offset);
    map.attributes.push_back(std::move(spec));
  }
  ASSIGN_OR_RETURN(map.width, Get<std::size_t>(j, "width"));
  if (map.width != expected_offset) {
    return absl::InvalidArgumentError("encoding: width does not match blocks");
  }
  ASSIGN_OR_RETURN(map.label, AttributeFromJson(j["label"]));
  if (j.contains("positive_label")) {
    ASSIGN_OR_RETURN(map.positive_label, Get<std::string>(j, "positive_label"));
  }
  return map;
}

}  // namespace json_util

std::string SchemaToJson(const Schema& schema) {
  return json_util::SchemaToJsonValue(schema).dump(2) + "\n";
}

absl::StatusOr<Schema> SchemaFromJson(std::string_view json) {
  ASSIGN_OR_RETURN(json_util::Json j, json_util::Parse(json, "schema"));
  return json_util::SchemaFromJsonValue(j);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write '", path, "'"));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to '", path, "'"));
  return absl::OkStatus();
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  auto schema = SchemaFromJson(text);
  if (!schema.ok()) {
    return absl::Status(schema.status().code(),
                        absl::StrCat(path, ": ", schema.status().message()));
  }
  return schema;
}

absl::Status SaveSchema(const Schema& schema, const std::string& path) {
  return WriteFile(path, SchemaToJson(schema));
}

std::string EncodingMapToJson(const EncodingMap& map) {
  return json_util::EncodingToJsonValue(map).dump(2) + "\n";
}

absl::StatusOr<EncodingMap> EncodingMapFromJson(std::string_view json) {
  ASSIGN_OR_RETURN(json_util::Json j, json_util::Parse(json, "encoding"));
  return json_util::EncodingFromJsonValue(j);
}

}  // namespace dpsynth
