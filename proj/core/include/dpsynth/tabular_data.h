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

// Tabular datasets: schema, CSV ingestion, preprocessing, the 8:1:1 split,
// feature encoding for the trainer and bootstrap rescaling.
//
// Cells are stored column-major as doubles. A categorical cell holds the
// index of its value in the attribute's category list; a numerical cell holds
// the value itself. Missing cells are NaN (see kMissing).

#ifndef DPSYNTH_TABULAR_DATA_H_
#define DPSYNTH_TABULAR_DATA_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpsynth {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool IsMissing(double v) { return v != v; }

enum class AttributeKind { kCategorical, kNumerical };

const char* AttributeKindName(AttributeKind kind);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::kCategorical;
  // Categorical only: ordered, duplicate-free category values.
  std::vector<std::string> categories;
  // Numerical only.
  double min = 0.0;
  double max = 0.0;

  bool is_categorical() const { return kind == AttributeKind::kCategorical; }
  // Index of `value` in `categories`, if present.
  std::optional<int> CategoryIndex(std::string_view value) const;
  absl::Status Validate() const;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

struct Schema {
  std::vector<AttributeSpec> attributes;
  AttributeSpec label;
  // Label value treated as the positive class for F1. Empty selects the last
  // (highest) label category.
  std::string positive_label;

  absl::Status Validate() const;
  absl::StatusOr<int> PositiveClass() const;
  std::optional<std::size_t> AttributeIndex(std::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

// Attribute columns without a label. The synthesizer only ever handles this
// type after extraction, so the original labels cannot reach its output.
class AttributeTable {
 public:
  static absl::StatusOr<AttributeTable> Create(
      std::vector<AttributeSpec> specs, std::vector<std::vector<double>> columns);

  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_attributes() const { return specs_.size(); }
  const std::vector<AttributeSpec>& specs() const { return specs_; }
  std::span<const double> column(std::size_t j) const { return columns_[j]; }
  double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  // Textual form of a cell: the category value or the shortest round-trip
  // decimal of a number. Missing cells render as "".
  std::string CellText(std::size_t row, std::size_t col) const;

  friend bool operator==(const AttributeTable&, const AttributeTable&) = default;

 private:
  friend class TabularDataset;

  AttributeTable(std::vector<AttributeSpec> specs,
                 std::vector<std::vector<double>> columns, std::size_t rows)
      : specs_(std::move(specs)), columns_(std::move(columns)), num_rows_(rows) {}

  std::vector<AttributeSpec> specs_;
  std::vector<std::vector<double>> columns_;
  std::size_t num_rows_ = 0;
};

class TabularDataset {
 public:
  // `columns` holds one vector per attribute followed by the label column.
  static absl::StatusOr<TabularDataset> Create(
      Schema schema, std::vector<std::vector<double>> columns);

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_attributes() const { return schema_.attributes.size(); }
  std::span<const double> column(std::size_t j) const { return columns_[j]; }
  std::span<const double> labels() const { return columns_.back(); }
  double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::string CellText(std::size_t row, std::size_t col) const;
  std::string LabelText(std::size_t row) const;
  bool HasMissing() const;

  // Attribute matrix with the label column removed.
  AttributeTable Attributes() const;
  TabularDataset SelectRows(std::span<const std::size_t> rows) const;

  friend bool operator==(const TabularDataset&, const TabularDataset&) = default;

 private:
  TabularDataset(Schema schema, std::vector<std::vector<double>> columns,
                 std::size_t rows)
      : schema_(std::move(schema)), columns_(std::move(columns)), num_rows_(rows) {}

  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::size_t num_rows_ = 0;
};

// Same values cell by cell, compared through their text form so datasets with
// differently ordered category lists can be compared.
bool SameContents(const TabularDataset& a, const TabularDataset& b);

struct CsvLoadOptions {
  // Fixes kinds and categorical domains. Unknown categories are an error.
  std::optional<Schema> schema_hint;
  // Label column name. Empty selects the last column (ignored with a hint).
  std::string label;
};

// CSV dialect: comma-separated, header row, optional double quotes, "?" and
// "" read as missing.
absl::StatusOr<TabularDataset> LoadCsv(const std::string& path,
                                       const CsvLoadOptions& options = {});
absl::StatusOr<TabularDataset> ParseCsv(std::string_view text,
                                        const CsvLoadOptions& options = {});
std::string FormatCsv(const TabularDataset& d);
absl::Status WriteCsv(const TabularDataset& d, const std::string& path);

struct PreprocessPolicy {
  bool drop_null_rows = true;
  bool drop_constant_attributes = true;
  bool floor_numerical = false;
};

// Drops rows with missing cells, then attributes whose value is constant over
// all remaining records, optionally flooring numerical values. Domains are
// recomputed from the surviving records.
absl::StatusOr<TabularDataset> Preprocess(const TabularDataset& d,
                                          const PreprocessPolicy& policy = {});

struct DatasetSplit {
  TabularDataset train;
  TabularDataset validation;
  TabularDataset test;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

// floor(0.8 n), floor(0.1 n), remainder.
SplitSizes SplitSizesFor(std::size_t n);

// Uniform row permutation followed by contiguous 8:1:1 slicing.
absl::StatusOr<DatasetSplit> Split(const TabularDataset& d, std::uint64_t seed);

// Row permutation used by Split, exposed for replay.
std::vector<std::size_t> SplitPermutation(std::size_t n, std::uint64_t seed);

// factor * n rows drawn with replacement. factor == 1 returns d unchanged.
absl::StatusOr<TabularDataset> BootstrapScale(const TabularDataset& d,
                                              std::size_t factor,
                                              std::uint64_t seed);

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Column layout of the encoded feature matrix, fit on a training split.
struct EncodingMap {
  // Fitted attribute specs: categorical domains restricted to observed values,
  // numerical (min, max) observed on the fit data.
  std::vector<AttributeSpec> attributes;
  // Offset of each attribute's block in the feature vector.
  std::vector<std::size_t> offsets;
  std::size_t width = 0;
  AttributeSpec label;
  std::string positive_label;

  std::size_t block_width(std::size_t j) const;
  std::size_t class_count() const { return label.categories.size(); }

  friend bool operator==(const EncodingMap&, const EncodingMap&) = default;
};

struct EncodedMatrix {
  RowMatrix features;
  std::vector<int> labels;
  std::size_t num_rows() const { return static_cast<std::size_t>(features.rows()); }
};

absl::StatusOr<EncodingMap> FitEncoding(const TabularDataset& train);

struct EncodeOptions {
  // Categories absent from the encoding map become an all-zero block instead
  // of an error.
  bool allow_unseen_categories = true;
};

absl::StatusOr<RowMatrix> EncodeFeatures(const AttributeTable& x,
                                         const EncodingMap& map,
                                         const EncodeOptions& options = {});
absl::StatusOr<EncodedMatrix> Encode(const TabularDataset& d,
                                     const EncodingMap& map,
                                     const EncodeOptions& options = {});
// Inverse of Encode for rows that lie in the fitted domain. The result uses
// the map's fitted schema.
absl::StatusOr<TabularDataset> Decode(const EncodedMatrix& m,
                                      const EncodingMap& map);

// Infers a dataset schema from raw string columns. Exposed for tests.
AttributeSpec InferAttribute(std::string name,
                             std::span<const std::string_view> values,
                             bool force_categorical);

// Shortest decimal string that parses back to `v`.
std::string FormatNumber(double v);

}  // namespace dpsynth

#endif  // DPSYNTH_TABULAR_DATA_H_
