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

#ifndef DPSYNTH_SRC_CSV_H_
#define DPSYNTH_SRC_CSV_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace dpsynth::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<std::size_t> line_numbers;
};

// Parses comma-separated text with a header line. Fields may be double-quoted
// ("" escapes a quote). Unquoted fields are trimmed of surrounding spaces.
absl::StatusOr<Table> Parse(std::string_view text);

// Quotes the field only when it contains a comma, quote or newline.
std::string EscapeField(std::string_view field);

}  // namespace dpsynth::csv

#endif  // DPSYNTH_SRC_CSV_H_
