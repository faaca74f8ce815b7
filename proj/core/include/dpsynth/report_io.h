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

// Report serialization: the JSON report array and the CSV summary tables.

#ifndef DPSYNTH_REPORT_IO_H_
#define DPSYNTH_REPORT_IO_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpsynth/downstream_eval.h"

namespace dpsynth {

std::string ReportsToJson(std::span<const EvalReport> reports);
absl::StatusOr<std::vector<EvalReport>> ReportsFromJson(std::string_view json);

// One row per synthesizer, columns <model>_accuracy, <model>_f1,
// <model>_collapse for every model kind present. Timed-out cells read "T/O".
std::string SummaryCsv(std::span<const EvalReport> reports);

// One row per (synthesizer, model), one accuracy column per scale factor.
std::string ScaleCsv(std::span<const EvalReport> reports);

}  // namespace dpsynth

#endif  // DPSYNTH_REPORT_IO_H_
