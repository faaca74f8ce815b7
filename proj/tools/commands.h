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

// The dpsynth command-line interface.

#ifndef DPSYNTH_TOOLS_COMMANDS_H_
#define DPSYNTH_TOOLS_COMMANDS_H_

#include <ostream>
#include <string>

namespace dpsynth::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitTraining = 4,
  kExitEvaluation = 5,
  kExitInfeasibleBudget = 6,
};

// Parses argv and runs the selected subcommand. Results go to `out`,
// diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// What `dpsynth --help` prints.
std::string HelpText();

}  // namespace dpsynth::cli

#endif  // DPSYNTH_TOOLS_COMMANDS_H_
