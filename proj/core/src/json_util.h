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

// nlohmann/json bindings shared by the serializers. Not installed.

#ifndef DPSYNTH_SRC_JSON_UTIL_H_
#define DPSYNTH_SRC_JSON_UTIL_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/tabular_data.h"
#include "json.hpp"

namespace dpsynth::json_util {

using Json = nlohmann::ordered_json;

// Rejects keys outside `allowed` and reports missing `required` keys.
absl::Status CheckKeys(const Json& object, std::string_view what,
                       std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional = {});

absl::StatusOr<Json> Parse(std::string_view text, std::string_view what);

Json AttributeToJson(const AttributeSpec& spec);
absl::StatusOr<AttributeSpec> AttributeFromJson(const Json& j);

Json SchemaToJsonValue(const Schema& schema);
absl::StatusOr<Schema> SchemaFromJsonValue(const Json& j);

Json EncodingToJsonValue(const EncodingMap& map);
absl::StatusOr<EncodingMap> EncodingFromJsonValue(const Json& j);

// Typed field access with a descriptive error on mismatch.
template <typename T>
absl::StatusOr<T> Get(const Json& object, std::string_view key) {
  auto it = object.find(std::string(key));
  if (it == object.end()) {
    return absl::InvalidArgumentError(std::string("missing key '") +
                                      std::string(key) + "'");
  }
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(std::string("key '") + std::string(key) +
                                      "': " + e.what());
  }
}

}  // namespace dpsynth::json_util

#endif  // DPSYNTH_SRC_JSON_UTIL_H_
