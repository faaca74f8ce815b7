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

// Run configuration shared by the CLI subcommands.
//
// Values are resolved in this order, later entries winning: built-in
// defaults, the JSON config file, the DPSYNTH_OUTPUT_DIR environment variable
// (output directory only), command-line flags.

#ifndef DPSYNTH_TOOLS_RUN_CONFIG_H_
#define DPSYNTH_TOOLS_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/downstream_eval.h"
#include "dpsynth/privacy_accountant.h"
#include "dpsynth/tabular_data.h"

namespace dpsynth::cli {

inline constexpr char kOutputDirEnv[] = "DPSYNTH_OUTPUT_DIR";

struct RunConfig {
  std::string dataset;
  // Defaults to the dataset file stem.
  std::string dataset_id;
  std::string schema;
  std::string label;
  PrivacyBudget budget = {.epsilon = 3.0, .delta = kDefaultDelta};
  std::uint64_t seed = 0;
  PreprocessPolicy preprocess;
  TrainerSettings trainer;
  std::vector<DownstreamModelKind> models = {DownstreamModelKind::kMlp,
                                             DownstreamModelKind::kLinearSvm};
  int repeats = 5;
  bool include_baseline = true;
  double timeout_s = 6 * 3600.0;
  bool record_runtime = true;
  std::vector<std::size_t> scale_factors = {1, 2, 3};
  DownstreamOptions downstream;
  std::string output_dir = "dpsynth_out";

  std::string ResolvedDatasetId() const;
};

// Overlays the keys present in `json` onto `base`. Unknown keys, wrong types
// and invalid values are errors.
absl::StatusOr<RunConfig> ParseRunConfig(std::string_view json, RunConfig base = {});
absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

// Every field, in a fixed order.
std::string RunConfigToJson(const RunConfig& config);

// ContentId of RunConfigToJson with output_dir cleared, so the same run
// written to two places carries the same hash.
std::string ConfigHash(const RunConfig& config);

absl::Status ValidateRunConfig(const RunConfig& config);

BenchmarkOptions ToBenchmarkOptions(const RunConfig& config);

}  // namespace dpsynth::cli

#endif  // DPSYNTH_TOOLS_RUN_CONFIG_H_
