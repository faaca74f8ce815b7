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

// Shuffle-and-relabel synthesis: the label column is dropped, every attribute
// column is permuted independently, and the DP model assigns new labels.

#ifndef DPSYNTH_SYNTHESIZER_H_
#define DPSYNTH_SYNTHESIZER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/dpsgd_trainer.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth {

struct ShuffledAttributes {
  AttributeTable table;
  // Seed of the permutation applied to each column.
  std::vector<std::uint64_t> column_seeds;
};

struct SyntheticProvenance {
  std::string model_id;
  std::uint64_t seed = 0;
  PrivacyBudget budget;
  double epsilon_spent = 0.0;
  double noise_multiplier = 0.0;
};

struct SyntheticDataset {
  ShuffledAttributes attributes;
  // Indices into label_spec.categories.
  std::vector<int> labels;
  AttributeSpec label_spec;
  std::string positive_label;
  SyntheticProvenance provenance;

  std::size_t num_rows() const { return labels.size(); }
  absl::StatusOr<TabularDataset> ToDataset() const;
};

// Seed of column j's permutation: DeriveSeed(seed, kShuffle, j). Adding a
// column leaves the others' permutations unchanged.
std::uint64_t ColumnSeed(std::uint64_t seed, std::size_t column);

// Uniform permutation of [0, n) by Fisher-Yates from `column_seed`.
std::vector<std::size_t> ColumnPermutation(std::size_t n, std::uint64_t column_seed);

struct ShuffleOptions {
  // Test hook: keep every column in its original order.
  bool identity_permutation = false;
};

absl::StatusOr<ShuffledAttributes> ShuffleAttributes(const AttributeTable& x,
                                                     std::uint64_t seed,
                                                     const ShuffleOptions& options = {});

// Labels predicted by the DP model for every shuffled row.
absl::StatusOr<std::vector<int>> SynthesizeLabels(const TrainedModel& model,
                                                  const ShuffledAttributes& x);

struct SynthesizeOptions {
  bool identity_permutation = false;
  // Rows are resampled with replacement to factor * n before shuffling when
  // greater than 1.
  std::size_t oversample_factor = 1;
};

absl::StatusOr<SyntheticDataset> Synthesize(const TabularDataset& d,
                                            const TrainedModel& model,
                                            std::uint64_t seed,
                                            const SynthesizeOptions& options = {});

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTHESIZER_H_
