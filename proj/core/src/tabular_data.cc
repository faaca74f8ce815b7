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

#include "dpsynth/tabular_data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "csv.h"
#include "dpsynth/rng.h"
#include "dpsynth/status_macros.h"

namespace dpsynth {
namespace {

bool IsMissingToken(std::string_view s) { return s.empty() || s == "?"; }

std::optional<double> ParseNumber(std::string_view s) {
  double v = 0.0;
  if (!absl::SimpleAtod(absl::string_view(s.data(), s.size()), &v) || !std::isfinite(v)) return std::nullopt;
  return v;
}

absl::Status ValidateColumn(const AttributeSpec& spec,
                            std::span<const double> column) {
  for (std::size_t i = 0; i < column.size(); ++i) {
    const double v = column[i];
    if (IsMissing(v)) continue;
    if (spec.is_categorical()) {
      if (v != std::floor(v) || v < 0 ||
          v >= static_cast<double>(spec.categories.size())) {
        return absl::OutOfRangeError(absl::StrCat(
            "row ", i, ": category code ", v, " outside domain of '",
            spec.name, "'"));
      }
    } else if (!std::isfinite(v)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", i, ": non-finite value in numerical attribute '", spec.name,
          "'"));
    }
  }
  return absl::OkStatus();
}

std::string CellTextFor(const AttributeSpec& spec, double v) {
  if (IsMissing(v)) return "";
  if (spec.is_categorical()) return spec.categories[static_cast<std::size_t>(v)];
  return FormatNumber(v);
}

// Restricts every categorical domain to the codes actually used and refreshes
// numerical (min, max). Codes are remapped in place.
void RefitDomain(AttributeSpec& spec, std::vector<double>& column) {
  if (spec.is_categorical()) {
    std::vector<char> used(spec.categories.size(), 0);
    for (double v : column) {
      if (!IsMissing(v)) used[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<int> remap(spec.categories.size(), -1);
    std::vector<std::string> kept;
    for (std::size_t k = 0; k < spec.categories.size(); ++k) {
      if (!used[k]) continue;
      remap[k] = static_cast<int>(kept.size());
      kept.push_back(spec.categories[k]);
    }
    for (double& v : column) {
      if (!IsMissing(v)) v = remap[static_cast<std::size_t>(v)];
    }
    spec.categories = std::move(kept);
    return;
  }
  bool any = false;
  for (double v : column) {
    if (IsMissing(v)) continue;
    if (!any) {
      spec.min = spec.max = v;
      any = true;
    } else {
      spec.min = std::min(spec.min, v);
      spec.max = std::max(spec.max, v);
    }
  }
}

bool IsConstant(const AttributeSpec& spec) {
  if (spec.is_categorical()) return spec.categories.size() <= 1;
  return spec.min == spec.max;
}

std::vector<std::vector<double>> GatherRows(
    const std::vector<std::span<const double>>& columns,
    std::span<const std::size_t> rows) {
  std::vector<std::vector<double>> out(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out[j].reserve(rows.size());
    for (std::size_t r : rows) out[j].push_back(columns[j][r]);
  }
  return out;
}

}  // namespace

const char* AttributeKindName(AttributeKind kind) {
  return kind == AttributeKind::kCategorical ? "categorical" : "numerical";
}

std::string FormatNumber(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::optional<int> AttributeSpec::CategoryIndex(std::string_view value) const {
  for (std::size_t k = 0; k < categories.size(); ++k) {
    if (categories[k] == value) return static_cast<int>(k);
  }
  return std::nullopt;
}

absl::Status AttributeSpec::Validate() const {
  if (name.empty()) return absl::InvalidArgumentError("attribute with empty name");
  if (is_categorical()) {
    if (categories.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("categorical attribute '", name, "' has an empty domain"));
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& c : categories) {
      if (!seen.insert(c).second) {
        return absl::InvalidArgumentError(absl::StrCat(
            "categorical attribute '", name, "' repeats category '", c, "'"));
      }
    }
    return absl::OkStatus();
  }
  if (!std::isfinite(min) || !std::isfinite(max) || min > max) {
    return absl::InvalidArgumentError(absl::StrCat(
        "numerical attribute '", name, "' has invalid range [", min, ", ", max, "]"));
  }
  return absl::OkStatus();
}

absl::Status Schema::Validate() const {
  std::unordered_set<std::string_view> names;
  for (const auto& a : attributes) {
    RETURN_IF_ERROR(a.Validate());
    if (!names.insert(a.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate attribute name '", a.name, "'"));
    }
  }
  RETURN_IF_ERROR(label.Validate());
  if (!label.is_categorical()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label '", label.name, "' must be categorical"));
  }
  if (names.contains(label.name)) {
    return absl::InvalidArgumentError(
        absl::StrCat("label '", label.name, "' is also an attribute"));
  }
  if (!positive_label.empty() && !label.CategoryIndex(positive_label)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "positive label '", positive_label, "' is not a value of '", label.name, "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<int> Schema::PositiveClass() const {
  if (label.categories.empty()) {
    return absl::FailedPreconditionError("label has no categories");
  }
  if (positive_label.empty()) return static_cast<int>(label.categories.size()) - 1;
  auto idx = label.CategoryIndex(positive_label);
  if (!idx) {
    return absl::NotFoundError(
        absl::StrCat("positive label '", positive_label, "' not in label domain"));
  }
  return *idx;
}

std::optional<std::size_t> Schema::AttributeIndex(std::string_view name) const {
  for (std::size_t j = 0; j < attributes.size(); ++j) {
    if (attributes[j].name == name) return j;
  }
  return std::nullopt;
}

absl::StatusOr<AttributeTable> AttributeTable::Create(
    std::vector<AttributeSpec> specs, std::vector<std::vector<double>> columns) {
  if (specs.size() != columns.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "attribute table has ", specs.size(), " specs but ", columns.size(),
        " columns"));
  }
  if (specs.empty()) return absl::InvalidArgumentError("attribute table has no columns");
  const std::size_t n = columns.front().size();
  if (n == 0) return absl::InvalidArgumentError("attribute table has no rows");
  for (std::size_t j = 0; j < specs.size(); ++j) {
    RETURN_IF_ERROR(specs[j].Validate());
    if (columns[j].size() != n) {
      return absl::InvalidArgumentError(
          absl::StrCat("column '", specs[j].name, "' has ", columns[j].size(),
                       " rows, expected ", n));
    }
    RETURN_IF_ERROR(ValidateColumn(specs[j], columns[j]));
  }
  return AttributeTable(std::move(specs), std::move(columns), n);
}

std::string AttributeTable::CellText(std::size_t row, std::size_t col) const {
  return CellTextFor(specs_[col], columns_[col][row]);
}

absl::StatusOr<TabularDataset> TabularDataset::Create(
    Schema schema, std::vector<std::vector<double>> columns) {
  RETURN_IF_ERROR(schema.Validate());
  if (columns.size() != schema.attributes.size() + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dataset expects ", schema.attributes.size() + 1, " columns, got ",
        columns.size()));
  }
  const std::size_t n = columns.front().size();
  if (n == 0) return absl::InvalidArgumentError("dataset has no rows");
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const AttributeSpec& spec =
        j < schema.attributes.size() ? schema.attributes[j] : schema.label;
    if (columns[j].size() != n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "column '", spec.name, "' has ", columns[j].size(), " rows, expected ", n));
    }
    RETURN_IF_ERROR(ValidateColumn(spec, columns[j]));
  }
  return TabularDataset(std::move(schema), std::move(columns), n);
}

std::string TabularDataset::CellText(std::size_t row, std::size_t col) const {
  const AttributeSpec& spec =
      col < schema_.attributes.size() ? schema_.attributes[col] : schema_.label;
  return CellTextFor(spec, columns_[col][row]);
}

std::string TabularDataset::LabelText(std::size_t row) const {
  return CellTextFor(schema_.label, columns_.back()[row]);
}

bool TabularDataset::HasMissing() const {
  for (const auto& c : columns_) {
    if (std::any_of(c.begin(), c.end(), IsMissing)) return true;
  }
  return false;
}

AttributeTable TabularDataset::Attributes() const {
  std::vector<std::vector<double>> cols(columns_.begin(), columns_.end() - 1);
  return AttributeTable(schema_.attributes, std::move(cols), num_rows_);
}

TabularDataset TabularDataset::SelectRows(std::span<const std::size_t> rows) const {
  std::vector<std::span<const double>> cols(columns_.begin(), columns_.end());
  return TabularDataset(schema_, GatherRows(cols, rows), rows.size());
}

bool SameContents(const TabularDataset& a, const TabularDataset& b) {
  if (a.num_rows() != b.num_rows() || a.num_attributes() != b.num_attributes()) {
    return false;
  }
  for (std::size_t j = 0; j < a.num_attributes(); ++j) {
    if (a.schema().attributes[j].name != b.schema().attributes[j].name ||
        a.schema().attributes[j].kind != b.schema().attributes[j].kind) {
      return false;
    }
  }
  if (a.schema().label.name != b.schema().label.name) return false;
  for (std::size_t j = 0; j <= a.num_attributes(); ++j) {
    for (std::size_t i = 0; i < a.num_rows(); ++i) {
      if (a.CellText(i, j) != b.CellText(i, j)) return false;
    }
  }
  return true;
}

AttributeSpec InferAttribute(std::string name,
                             std::span<const std::string_view> values,
                             bool force_categorical) {
  AttributeSpec spec;
  spec.name = std::move(name);
  bool all_numeric = true;
  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (std::string_view v : values) {
    if (IsMissingToken(v)) continue;
    auto x = ParseNumber(v);
    if (!x) {
      all_numeric = false;
      if (force_categorical) continue;
      break;
    }
    lo = any ? std::min(lo, *x) : *x;
    hi = any ? std::max(hi, *x) : *x;
    any = true;
  }
  if (all_numeric && any && !force_categorical) {
    spec.kind = AttributeKind::kNumerical;
    spec.min = lo;
    spec.max = hi;
    return spec;
  }
  spec.kind = AttributeKind::kCategorical;
  std::unordered_set<std::string_view> distinct;
  for (std::string_view v : values) {
    if (!IsMissingToken(v)) distinct.insert(v);
  }
  std::vector<std::string> cats(distinct.begin(), distinct.end());
  if (all_numeric && any) {
    std::sort(cats.begin(), cats.end(), [](const std::string& a, const std::string& b) {
      const double x = *ParseNumber(a), y = *ParseNumber(b);
      return x != y ? x < y : a < b;
    });
  } else {
    std::sort(cats.begin(), cats.end());
  }
  spec.categories = std::move(cats);
  return spec;
}

absl::StatusOr<TabularDataset> ParseCsv(std::string_view text,
                                        const CsvLoadOptions& options) {
  ASSIGN_OR_RETURN(csv::Table table, csv::Parse(text));
  const std::size_t width = table.header.size();
  if (width < 2) {
    return absl::InvalidArgumentError(
        "CSV needs at least one attribute column and a label column");
  }
  if (table.rows.empty()) return absl::InvalidArgumentError("CSV has no data rows");
  {
    std::unordered_set<std::string_view> names;
    for (const auto& h : table.header) {
      if (!names.insert(h).second) {
        return absl::InvalidArgumentError(absl::StrCat("duplicate column '", h, "'"));
      }
    }
  }

  Schema schema;
  // Source column for each schema column (attributes, then label).
  std::vector<std::size_t> source;
  if (options.schema_hint) {
    schema = *options.schema_hint;
    RETURN_IF_ERROR(schema.Validate());
    if (schema.attributes.size() + 1 != width) {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema describes ", schema.attributes.size() + 1, " columns, CSV has ",
          width));
    }
    auto find = [&](const std::string& name) -> absl::StatusOr<std::size_t> {
      for (std::size_t c = 0; c < width; ++c) {
        if (table.header[c] == name) return c;
      }
      return absl::InvalidArgumentError(
          absl::StrCat("column '", name, "' from schema not found in CSV header"));
    };
    for (const auto& a : schema.attributes) {
      ASSIGN_OR_RETURN(std::size_t c, find(a.name));
      source.push_back(c);
    }
    ASSIGN_OR_RETURN(std::size_t c, find(schema.label.name));
    source.push_back(c);
  } else {
    std::size_t label_col = width - 1;
    if (!options.label.empty()) {
      auto it = std::find(table.header.begin(), table.header.end(), options.label);
      if (it == table.header.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("label column '", options.label, "' not in CSV header"));
      }
      label_col = static_cast<std::size_t>(it - table.header.begin());
    }
    std::vector<std::string_view> values(table.rows.size());
    auto infer = [&](std::size_t c, bool is_label) {
      for (std::size_t r = 0; r < table.rows.size(); ++r) values[r] = table.rows[r][c];
      return InferAttribute(table.header[c], values, is_label);
    };
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) continue;
      schema.attributes.push_back(infer(c, false));
      source.push_back(c);
    }
    schema.label = infer(label_col, true);
    source.push_back(label_col);
    for (const auto& a : schema.attributes) {
      if (a.is_categorical() && a.categories.empty()) {
        return absl::InvalidArgumentError(
            absl::StrCat("column '", a.name, "' has no non-missing values"));
      }
    }
    RETURN_IF_ERROR(schema.Validate());
  }

  std::vector<std::vector<double>> columns(source.size());
  for (std::size_t j = 0; j < source.size(); ++j) {
    const AttributeSpec& spec =
        j < schema.attributes.size() ? schema.attributes[j] : schema.label;
    std::unordered_map<std::string_view, int> index;
    if (spec.is_categorical()) {
      for (std::size_t k = 0; k < spec.categories.size(); ++k) {
        index.emplace(spec.categories[k], static_cast<int>(k));
      }
    }
    auto& col = columns[j];
    col.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string& cell = table.rows[r][source[j]];
      if (IsMissingToken(cell)) {
        col.push_back(kMissing);
      } else if (spec.is_categorical()) {
        auto it = index.find(cell);
        if (it == index.end()) {
          return absl::OutOfRangeError(absl::StrCat(
              "line ", table.line_numbers[r], ": value '", cell,
              "' is not in the domain of '", spec.name, "'"));
        }
        col.push_back(it->second);
      } else {
        auto v = ParseNumber(cell);
        if (!v) {
          return absl::InvalidArgumentError(absl::StrCat(
              "line ", table.line_numbers[r], ": '", cell,
              "' is not a finite number for '", spec.name, "'"));
        }
        col.push_back(*v);
      }
    }
  }
  return TabularDataset::Create(std::move(schema), std::move(columns));
}

absl::StatusOr<TabularDataset> LoadCsv(const std::string& path,
                                       const CsvLoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto d = ParseCsv(buffer.str(), options);
  if (!d.ok()) {
    return absl::Status(d.status().code(),
                        absl::StrCat(path, ": ", d.status().message()));
  }
  return d;
}

std::string FormatCsv(const TabularDataset& d) {
  std::string out;
  std::vector<std::string> fields;
  for (const auto& a : d.schema().attributes) fields.push_back(csv::EscapeField(a.name));
  fields.push_back(csv::EscapeField(d.schema().label.name));
  absl::StrAppend(&out, absl::StrJoin(fields, ","), "\n");
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    fields.clear();
    for (std::size_t j = 0; j <= d.num_attributes(); ++j) {
      fields.push_back(csv::EscapeField(d.CellText(i, j)));
    }
    absl::StrAppend(&out, absl::StrJoin(fields, ","), "\n");
  }
  return out;
}

absl::Status WriteCsv(const TabularDataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write '", path, "'"));
  out << FormatCsv(d);
  if (!out) return absl::DataLossError(absl::StrCat("short write to '", path, "'"));
  return absl::OkStatus();
}

absl::StatusOr<TabularDataset> Preprocess(const TabularDataset& d,
                                          const PreprocessPolicy& policy) {
  Schema schema = d.schema();
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j <= d.num_attributes(); ++j) {
    columns.emplace_back(d.column(j).begin(), d.column(j).end());
  }
  if (policy.floor_numerical) {
    for (std::size_t j = 0; j < schema.attributes.size(); ++j) {
      if (schema.attributes[j].is_categorical()) continue;
      for (double& v : columns[j]) {
        if (!IsMissing(v)) v = std::floor(v);
      }
    }
  }
  if (policy.drop_null_rows) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.num_rows(); ++i) {
      bool complete = true;
      for (const auto& c : columns) {
        if (IsMissing(c[i])) {
          complete = false;
          break;
        }
      }
      if (complete) keep.push_back(i);
    }
    if (keep.empty()) {
      return absl::FailedPreconditionError(
          "degenerate dataset: every row contains a missing value");
    }
    std::vector<std::span<const double>> views(columns.begin(), columns.end());
    columns = GatherRows(views, keep);
  }
  for (std::size_t j = 0; j < schema.attributes.size(); ++j) {
    RefitDomain(schema.attributes[j], columns[j]);
  }
  RefitDomain(schema.label, columns.back());
  if (!schema.positive_label.empty() &&
      !schema.label.CategoryIndex(schema.positive_label)) {
    schema.positive_label.clear();
  }
  if (policy.drop_constant_attributes) {
    Schema kept = schema;
    kept.attributes.clear();
    std::vector<std::vector<double>> kept_columns;
    for (std::size_t j = 0; j < schema.attributes.size(); ++j) {
      if (IsConstant(schema.attributes[j])) continue;
      kept.attributes.push_back(schema.attributes[j]);
      kept_columns.push_back(std::move(columns[j]));
    }
    kept_columns.push_back(std::move(columns.back()));
    schema = std::move(kept);
    columns = std::move(kept_columns);
  }
  if (schema.attributes.empty()) {
    return absl::FailedPreconditionError(
        "degenerate dataset: preprocessing removed every attribute");
  }
  return TabularDataset::Create(std::move(schema), std::move(columns));
}

SplitSizes SplitSizesFor(std::size_t n) {
  SplitSizes s;
  s.train = n * 8 / 10;
  s.validation = n / 10;
  s.test = n - s.train - s.validation;
  return s;
}

std::vector<std::size_t> SplitPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

absl::StatusOr<DatasetSplit> Split(const TabularDataset& d, std::uint64_t seed) {
  if (d.num_rows() < 10) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dataset too small to split: ", d.num_rows(), " rows, need at least 10"));
  }
  const std::vector<std::size_t> perm = SplitPermutation(d.num_rows(), seed);
  const SplitSizes s = SplitSizesFor(d.num_rows());
  std::span<const std::size_t> all(perm);
  return DatasetSplit{
      .train = d.SelectRows(all.subspan(0, s.train)),
      .validation = d.SelectRows(all.subspan(s.train, s.validation)),
      .test = d.SelectRows(all.subspan(s.train + s.validation)),
  };
}

absl::StatusOr<TabularDataset> BootstrapScale(const TabularDataset& d,
                                              std::size_t factor,
                                              std::uint64_t seed) {
  if (factor == 0) return absl::InvalidArgumentError("bootstrap factor must be >= 1");
  if (factor == 1) return d;
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, d.num_rows() - 1);
  std::vector<std::size_t> rows(factor * d.num_rows());
  for (auto& r : rows) r = pick(rng);
  return d.SelectRows(rows);
}

std::size_t EncodingMap::block_width(std::size_t j) const {
  const AttributeSpec& a = attributes[j];
  return a.is_categorical() ? a.categories.size() : 1;
}

absl::StatusOr<EncodingMap> FitEncoding(const TabularDataset& train) {
  EncodingMap map;
  map.label = train.schema().label;
  map.positive_label = train.schema().positive_label;
  for (std::size_t j = 0; j < train.num_attributes(); ++j) {
    AttributeSpec spec = train.schema().attributes[j];
    std::vector<double> col(train.column(j).begin(), train.column(j).end());
    if (std::any_of(col.begin(), col.end(), IsMissing)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "cannot fit encoding: attribute '", spec.name, "' has missing values"));
    }
    RefitDomain(spec, col);
    map.offsets.push_back(map.width);
    map.width += spec.is_categorical() ? spec.categories.size() : 1;
    map.attributes.push_back(std::move(spec));
  }
  return map;
}

absl::StatusOr<RowMatrix> EncodeFeatures(const AttributeTable& x,
                                         const EncodingMap& map,
                                         const EncodeOptions& options) {
  if (x.num_attributes() != map.attributes.size()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "encoding expects ", map.attributes.size(), " attributes, got ",
        x.num_attributes()));
  }
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(x.num_rows()),
                                  static_cast<Eigen::Index>(map.width));
  for (std::size_t j = 0; j < map.attributes.size(); ++j) {
    const AttributeSpec& fitted = map.attributes[j];
    const AttributeSpec& own = x.specs()[j];
    if (own.name != fitted.name || own.kind != fitted.kind) {
      return absl::FailedPreconditionError(absl::StrCat(
          "attribute ", j, " is '", own.name, "' (", AttributeKindName(own.kind),
          "), encoding expects '", fitted.name, "' (",
          AttributeKindName(fitted.kind), ")"));
    }
    const auto offset = static_cast<Eigen::Index>(map.offsets[j]);
    std::span<const double> col = x.column(j);
    if (fitted.is_categorical()) {
      std::vector<int> slot(own.categories.size(), -1);
      for (std::size_t k = 0; k < own.categories.size(); ++k) {
        if (auto s = fitted.CategoryIndex(own.categories[k])) slot[k] = *s;
      }
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (IsMissing(col[i])) {
          return absl::InvalidArgumentError(absl::StrCat(
              "row ", i, ": missing value in '", own.name, "'"));
        }
        const int s = slot[static_cast<std::size_t>(col[i])];
        if (s < 0) {
          if (options.allow_unseen_categories) continue;
          return absl::OutOfRangeError(absl::StrCat(
              "row ", i, ": category '", own.categories[static_cast<std::size_t>(col[i])],
              "' of '", own.name, "' is outside the encoding domain"));
        }
        out(static_cast<Eigen::Index>(i), offset + s) = 1.0;
      }
    } else {
      const double range = fitted.max - fitted.min;
      for (std::size_t i = 0; i < col.size(); ++i) {
        const double v = col[i];
        if (!std::isfinite(v)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "row ", i, ": non-finite value in '", own.name, "'"));
        }
        const double scaled = range > 0 ? (v - fitted.min) / range : 0.0;
        out(static_cast<Eigen::Index>(i), offset) = std::clamp(scaled, 0.0, 1.0);
      }
    }
  }
  return out;
}

absl::StatusOr<EncodedMatrix> Encode(const TabularDataset& d,
                                     const EncodingMap& map,
                                     const EncodeOptions& options) {
  EncodedMatrix m;
  ASSIGN_OR_RETURN(m.features, EncodeFeatures(d.Attributes(), map, options));
  const AttributeSpec& own = d.schema().label;
  std::vector<int> slot(own.categories.size(), -1);
  for (std::size_t k = 0; k < own.categories.size(); ++k) {
    if (auto s = map.label.CategoryIndex(own.categories[k])) slot[k] = *s;
  }
  m.labels.reserve(d.num_rows());
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    const double v = d.labels()[i];
    if (IsMissing(v)) {
      return absl::InvalidArgumentError(absl::StrCat("row ", i, ": missing label"));
    }
    const int s = slot[static_cast<std::size_t>(v)];
    if (s < 0) {
      return absl::OutOfRangeError(absl::StrCat(
          "row ", i, ": label '", own.categories[static_cast<std::size_t>(v)],
          "' is outside the encoding's label domain"));
    }
    m.labels.push_back(s);
  }
  return m;
}

absl::StatusOr<TabularDataset> Decode(const EncodedMatrix& m,
                                      const EncodingMap& map) {
  if (static_cast<std::size_t>(m.features.cols()) != map.width ||
      m.labels.size() != m.num_rows()) {
    return absl::InvalidArgumentError("encoded matrix does not match encoding map");
  }
  const std::size_t n = m.num_rows();
  std::vector<std::vector<double>> columns(map.attributes.size() + 1);
  for (std::size_t j = 0; j < map.attributes.size(); ++j) {
    const AttributeSpec& spec = map.attributes[j];
    const auto offset = static_cast<Eigen::Index>(map.offsets[j]);
    auto& col = columns[j];
    col.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      if (spec.is_categorical()) {
        const auto width = static_cast<Eigen::Index>(spec.categories.size());
        Eigen::Index best = 0;
        const double peak = m.features.row(row).segment(offset, width).maxCoeff(&best);
        if (peak < 0.5) {
          return absl::OutOfRangeError(absl::StrCat(
              "row ", i, ": out-of-vocabulary block for '", spec.name,
              "' cannot be decoded"));
        }
        col.push_back(static_cast<double>(best));
      } else {
        const double x = m.features(row, offset);
        col.push_back(spec.max > spec.min ? spec.min + x * (spec.max - spec.min)
                                          : spec.min);
      }
    }
  }
  auto& labels = columns.back();
  for (int y : m.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= map.label.categories.size()) {
      return absl::OutOfRangeError(absl::StrCat("label index ", y, " out of range"));
    }
    labels.push_back(y);
  }
  Schema schema{.attributes = map.attributes,
                .label = map.label,
                .positive_label = map.positive_label};
  return TabularDataset::Create(std::move(schema), std::move(columns));
}

}  // namespace dpsynth
