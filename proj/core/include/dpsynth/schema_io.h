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

#ifndef DPSYNTH_SCHEMA_IO_H_
#define DPSYNTH_SCHEMA_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {

// JSON schema document. Serializing a parsed document reproduces it byte for
// byte.
std::string SchemaToJson(const Schema& schema);
absl::StatusOr<Schema> SchemaFromJson(std::string_view json);

absl::StatusOr<Schema> LoadSchema(const std::string& path);
absl::Status SaveSchema(const Schema& schema, const std::string& path);

std::string EncodingMapToJson(const EncodingMap& map);
absl::StatusOr<EncodingMap> EncodingMapFromJson(std::string_view json);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

}  // namespace dpsynth

#endif  // DPSYNTH_SCHEMA_IO_H_
