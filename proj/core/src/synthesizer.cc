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

#include "dpsynth/synthesizer.h"

#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpsynth/checkpoint.h"
#include "dpsynth/rng.h"
#include "dpsynth/status_macros.h"

namespace dpsynth {
namespace {

absl::Status CheckCompatible(const std::vector<AttributeSpec>& specs,
                             const EncodingMap& encoding) {
  if (specs.size() != encoding.attributes.size()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "model was trained on ", encoding.attributes.size(), " attributes, data has ",
        specs.size()));
  }
  for (std::size_t j = 0; j < specs.size(); ++j) {
    if (specs[j].name != encoding.attributes[j].name ||
        specs[j].kind != encoding.attributes[j].kind) {
      return absl::FailedPreconditionError(absl::StrCat(
          "attribute ", j, " is '", specs[j].name, "' but the model expects '",
          encoding.attributes[j].name, "' (", AttributeKindName(encoding.attributes[j].kind),
          ")"));
    }
  }
  return absl::OkStatus();
}

}  // namespace

std::uint64_t ColumnSeed(std::uint64_t seed, std::size_t column) {
  return DeriveSeed(seed, SeedStream::kShuffle, column);
}

std::vector<std::size_t> ColumnPermutation(std::size_t n, std::uint64_t column_seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(column_seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

absl::StatusOr<ShuffledAttributes> ShuffleAttributes(const AttributeTable& x,
                                                     std::uint64_t seed,
                                                     const ShuffleOptions& options) {
  if (x.num_rows() == 0) return absl::InvalidArgumentError("nothing to shuffle");
  std::vector<std::vector<double>> columns(x.num_attributes());
  std::vector<std::uint64_t> seeds(x.num_attributes());
  for (std::size_t j = 0; j < x.num_attributes(); ++j) {
    std::span<const double> source = x.column(j);
    if (options.identity_permutation) {
      columns[j].assign(source.begin(), source.end());
      continue;
    }
    seeds[j] = ColumnSeed(seed, j);
    const std::vector<std::size_t> perm = ColumnPermutation(x.num_rows(), seeds[j]);
    columns[j].reserve(perm.size());
    for (std::size_t r : perm) columns[j].push_back(source[r]);
  }
  ASSIGN_OR_RETURN(AttributeTable table, AttributeTable::Create(x.specs(), std::move(columns)));
  return ShuffledAttributes{.table = std::move(table), .column_seeds = std::move(seeds)};
}

absl::StatusOr<std::vector<int>> SynthesizeLabels(const TrainedModel& model,
                                                  const ShuffledAttributes& x) {
  RETURN_IF_ERROR(CheckCompatible(x.table.specs(), model.encoding));
  ASSIGN_OR_RETURN(RowMatrix features, EncodeFeatures(x.table, model.encoding));
  return PredictBatch(model.model, features);
}

absl::StatusOr<TabularDataset> SyntheticDataset::ToDataset() const {
  const AttributeTable& table = attributes.table;
  std::vector<std::vector<double>> columns;
  columns.reserve(table.num_attributes() + 1);
  for (std::size_t j = 0; j < table.num_attributes(); ++j) {
    columns.emplace_back(table.column(j).begin(), table.column(j).end());
  }
  columns.emplace_back(labels.begin(), labels.end());
  Schema schema{.attributes = table.specs(), .label = label_spec,
                .positive_label = positive_label};
  return TabularDataset::Create(std::move(schema), std::move(columns));
}

absl::StatusOr<SyntheticDataset> Synthesize(const TabularDataset& d,
                                            const TrainedModel& model,
                                            std::uint64_t seed,
                                            const SynthesizeOptions& options) {
  RETURN_IF_ERROR(CheckCompatible(d.schema().attributes, model.encoding));
  if (d.schema().label.name != model.encoding.label.name) {
    return absl::FailedPreconditionError(absl::StrCat(
        "dataset label '", d.schema().label.name, "' differs from the model's label '",
        model.encoding.label.name, "'"));
  }
  if (options.oversample_factor == 0) {
    return absl::InvalidArgumentError("oversample factor must be >= 1");
  }
  // Labels are dropped here; nothing below sees d's label column.
  AttributeTable x = d.Attributes();
  if (options.oversample_factor > 1) {
    Rng rng(DeriveSeed(seed, SeedStream::kOversample));
    std::uniform_int_distribution<std::size_t> pick(0, x.num_rows() - 1);
    std::vector<std::vector<double>> columns(x.num_attributes());
    const std::size_t rows = options.oversample_factor * x.num_rows();
    std::vector<std::size_t> picks(rows);
    for (auto& r : picks) r = pick(rng);
    for (std::size_t j = 0; j < x.num_attributes(); ++j) {
      columns[j].reserve(rows);
      for (std::size_t r : picks) columns[j].push_back(x.at(r, j));
    }
    ASSIGN_OR_RETURN(x, AttributeTable::Create(x.specs(), std::move(columns)));
  }
  ASSIGN_OR_RETURN(ShuffledAttributes shuffled,
                   ShuffleAttributes(x, seed,
                                     {.identity_permutation = options.identity_permutation}));
  ASSIGN_OR_RETURN(std::vector<int> labels, SynthesizeLabels(model, shuffled));
  return SyntheticDataset{
      .attributes = std::move(shuffled),
      .labels = std::move(labels),
      .label_spec = model.encoding.label,
      .positive_label = model.encoding.positive_label,
      .provenance = {.model_id = CheckpointId(model),
                     .seed = seed,
                     .budget = model.budget,
                     .epsilon_spent = model.epsilon_spent,
                     .noise_multiplier = model.config.noise_multiplier},
  };
}

}  // namespace dpsynth
