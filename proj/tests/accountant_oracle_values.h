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

// Frozen outputs of tests/oracles/rdp_oracle.py. Regenerate with
//   python3 tests/oracles/rdp_oracle.py

#ifndef DPSYNTH_TESTS_ACCOUNTANT_ORACLE_VALUES_H_
#define DPSYNTH_TESTS_ACCOUNTANT_ORACLE_VALUES_H_

#include <cstdint>

namespace dpsynth::testing {

struct OracleEpsilon {
  std::int64_t num_examples;
  std::int64_t batch_size;
  std::int64_t epochs;
  double noise_multiplier;
  double delta;
  double epsilon;
  double best_order;
};

inline constexpr OracleEpsilon kOracleEpsilons[] = {
    {39073, 256, 20, 1.0, 1e-05, 2.6563894565379063, 8.5},
    {60000, 256, 60, 1.1, 1e-05, 3.0124127259618089, 8.8},
    {10000, 100, 10, 1.0, 1e-05, 2.5379828801793994, 7.9},
    {1000, 1000, 1, 1.0, 1e-05, 5.2985261385354642, 5.8},
    {36177, 256, 20, 0.8, 1e-05, 4.6363667926014872, 5.0},
    {50000, 500, 5, 2.0, 1e-06, 0.68398412603431579, 35.4},
    {20000, 64, 40, 1.5, 1e-05, 1.3458705897774826, 18.2},
    {5000, 50, 3, 0.7, 0.0001, 3.8450878588061564, 4.1},
    {100000, 1024, 100, 1.3, 1e-06, 5.3414697963242225, 6.4},
    {108531, 256, 20, 0.6, 1e-05, 6.4722094993289843, 3.5},
};

// One step, z = 1.1, q = 0.01, alpha = 16.
inline constexpr double kOracleSingleStepRdp = 1.69982672775317406;

// Oracle noise multiplier for N = 10000, b = 100, E = 10, (3, 1e-5).
inline constexpr double kOracleNoiseMultiplier = 0.9286611303687096;

}  // namespace dpsynth::testing

#endif  // DPSYNTH_TESTS_ACCOUNTANT_ORACLE_VALUES_H_
