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

// Renyi-DP accountant for the Poisson-subsampled Gaussian mechanism: converts
// DP-SGD settings (N, b, E, z) to an (epsilon, delta) guarantee and searches
// the noise multiplier z that meets a target budget.

#ifndef DPSYNTH_PRIVACY_ACCOUNTANT_H_
#define DPSYNTH_PRIVACY_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpsynth {

inline constexpr double kDefaultDelta = 1e-5;
// Noise multiplier search bracket and bisection tolerance.
inline constexpr double kNoiseSearchLow = 0.3;
inline constexpr double kNoiseSearchHigh = 1e4;
inline constexpr double kNoiseTolerance = 1e-3;

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = kDefaultDelta;

  absl::Status Validate() const;
};

struct SamplingConfig {
  double sampling_rate = 1.0;  // q = b / N
  std::int64_t steps = 1;      // T = E * ceil(N / b)

  static absl::StatusOr<SamplingConfig> ForTraining(std::int64_t num_examples,
                                                    std::int64_t batch_size,
                                                    std::int64_t epochs);
  absl::Status Validate() const;
};

// RDP of the composed mechanism at each order.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;
};

// Integers 2..256 plus {1.25, 1.5, 1.75, 2.5, 3.5}, ascending.
std::span<const double> DefaultOrders();

// RDP at order `alpha` of one step of the Gaussian mechanism with noise
// multiplier z under Poisson subsampling at rate q. Binomial expansion at
// integer orders, a two-sided Gaussian tail series otherwise; alpha / (2 z^2)
// when q == 1.
absl::StatusOr<double> RdpSingleStep(double noise_multiplier, double sampling_rate,
                                     double alpha);

// T-fold composition over `orders`.
absl::StatusOr<RdpCurve> ComputeRdp(double noise_multiplier,
                                    const SamplingConfig& sampling,
                                    std::span<const double> orders = DefaultOrders());

struct EpsilonAtOrder {
  double epsilon = 0.0;
  double order = 0.0;
};

// min over alpha of rdp(alpha) + log(1/delta) / (alpha - 1).
absl::StatusOr<EpsilonAtOrder> EpsilonFromRdp(const RdpCurve& curve, double delta);

absl::StatusOr<EpsilonAtOrder> ComputeEpsilonDetailed(std::int64_t num_examples,
                                                      std::int64_t batch_size,
                                                      std::int64_t epochs,
                                                      double noise_multiplier,
                                                      double delta);

absl::StatusOr<double> ComputeEpsilon(std::int64_t num_examples,
                                      std::int64_t batch_size, std::int64_t epochs,
                                      double noise_multiplier, double delta);

// Smallest z in [kNoiseSearchLow, kNoiseSearchHigh], to within
// kNoiseTolerance, whose epsilon does not exceed the budget. Fails with an
// infeasible-budget status (see IsInfeasibleBudget) when even the upper end
// of the bracket is not private enough.
absl::StatusOr<double> ComputeNoise(std::int64_t num_examples,
                                    std::int64_t batch_size, std::int64_t epochs,
                                    const PrivacyBudget& budget);

bool IsInfeasibleBudget(const absl::Status& status);

}  // namespace dpsynth

#endif  // DPSYNTH_PRIVACY_ACCOUNTANT_H_
