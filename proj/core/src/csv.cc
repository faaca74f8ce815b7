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

#include "csv.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace dpsynth::csv {
namespace {

// Splits one logical record starting at `pos`. Advances `pos` past the record
// terminator and `line` past every newline consumed.
absl::StatusOr<std::vector<std::string>> ParseRecord(std::string_view text,
                                                     std::size_t& pos,
                                                     std::size_t& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  const std::size_t start_line = line;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!absl::StripAsciiWhitespace(field).empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", start_line, ": stray quote inside field"));
      }
      field.clear();
      quoted = true;
      was_quoted = true;
      ++pos;
      continue;
    }
    if (c == ',' || c == '\n' || c == '\r') {
      fields.push_back(was_quoted ? std::move(field)
                                  : std::string(absl::StripAsciiWhitespace(field)));
      field.clear();
      was_quoted = false;
      if (c == ',') {
        ++pos;
        continue;
      }
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      ++line;
      return fields;
    }
    field.push_back(c);
    ++pos;
  }
  if (quoted) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", start_line, ": unterminated quoted field"));
  }
  fields.push_back(was_quoted ? std::move(field)
                              : std::string(absl::StripAsciiWhitespace(field)));
  return fields;
}

bool IsBlank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace

absl::StatusOr<Table> Parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  Table table;
  std::size_t pos = 0;
  std::size_t line = 1;
  while (pos < text.size()) {
    const std::size_t record_line = line;
    auto fields = ParseRecord(text, pos, line);
    if (!fields.ok()) return fields.status();
    if (IsBlank(*fields)) continue;
    if (table.header.empty()) {
      table.header = std::move(*fields);
      continue;
    }
    if (fields->size() != table.header.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", record_line, ": expected ", table.header.size(),
          " fields, found ", fields->size()));
    }
    table.rows.push_back(std::move(*fields));
    table.line_numbers.push_back(record_line);
  }
  if (table.header.empty()) {
    return absl::InvalidArgumentError("CSV input has no header line");
  }
  return table;
}

std::string EscapeField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace dpsynth::csv
