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

#include "dpsynth/privacy_accountant.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpsynth/status_macros.h"

namespace dpsynth {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr auto kOrders = [] {
  std::array<double, 260> orders{};
  std::size_t k = 0;
  orders[k++] = 1.25;
  orders[k++] = 1.5;
  orders[k++] = 1.75;
  orders[k++] = 2.0;
  orders[k++] = 2.5;
  orders[k++] = 3.0;
  orders[k++] = 3.5;
  for (int a = 4; a <= 256; ++a) orders[k++] = a;
  return orders;
}();

double LogAddExp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(e^c - 1) for c > 0.
double LogExpm1(double c) {
  return c > 1.0 ? c + std::log1p(-std::exp(-c)) : std::log(std::expm1(c));
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log A_alpha for integer alpha >= 1, where
//   A_alpha = sum_i C(alpha, i) q^i (1-q)^(alpha-i) exp((i^2 - i) / (2 z^2)).
// The i = 0 and i = 1 terms combine with the rest of the binomial mass to
// exactly 1, so the sum is evaluated as 1 + sum_{i>=2} (...) (e^{c_i} - 1),
// which keeps full relative precision when A_alpha is close to 1.
double LogMomentInteger(double z, double q, int alpha) {
  if (alpha <= 1) return 0.0;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  double log_excess = -kInf;
  for (int i = 2; i <= alpha; ++i) {
    const double c = (static_cast<double>(i) * i - i) / (2.0 * z * z);
    const double term = LogBinomial(alpha, i) + i * log_q + (alpha - i) * log_1mq +
                        LogExpm1(c);
    log_excess = LogAddExp(log_excess, term);
  }
  // log(1 + e^L)
  return log_excess > 0 ? log_excess + std::log1p(std::exp(-log_excess))
                        : std::log1p(std::exp(log_excess));
}

// log(e^a - e^b) for a > b; -inf when the difference is not positive.
double LogSubExp(double a, double b) {
  if (b == -kInf) return a;
  if (!(a > b)) return -kInf;
  return a + std::log1p(-std::exp(b - a));
}

double LogErfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  // Asymptotic expansion; erfc underflows past here.
  const double r = 1.0 / (x * x);
  return -x * x - std::log(x) - 0.5 * std::log(3.14159265358979323846) +
         std::log1p(r * (-0.5 + r * (0.75 - r * 1.875)));
}

// log A_alpha for fractional alpha, from the two-sided series
//   A_alpha = sum_i C(alpha, i) [q^i (1-q)^(alpha-i) e^{(i^2-i)/(2z^2)} E0_i
//                                + q^(alpha-i) (1-q)^i e^{(j^2-j)/(2z^2)} E1_i],
// j = alpha - i, E0_i and E1_i being Gaussian tail masses on either side of
// z^2 log(1/q - 1) + 1/2. Terms are summed until both fall below e^-30.
double LogMomentFractional(double z, double q, double alpha) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double z2 = z * z;
  const double cut = z2 * std::log(1.0 / q - 1.0) + 0.5;
  const double sqrt2z = std::sqrt(2.0) * z;
  double log_a0 = -kInf;
  double log_a1 = -kInf;
  double log_coef = 0.0;
  bool positive = true;
  for (int i = 0; i < 100000; ++i) {
    if (i > 0) {
      const double f = alpha - i + 1;
      log_coef += std::log(std::abs(f)) - std::log(static_cast<double>(i));
      if (f < 0) positive = !positive;
    }
    const double j = alpha - i;
    const double log_t0 = log_coef + i * log_q + j * log_1mq;
    const double log_t1 = log_coef + j * log_q + i * log_1mq;
    const double log_e0 = std::log(0.5) + LogErfc((i - cut) / sqrt2z);
    const double log_e1 = std::log(0.5) + LogErfc((cut - j) / sqrt2z);
    const double log_s0 = log_t0 + (static_cast<double>(i) * i - i) / (2 * z2) + log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2 * z2) + log_e1;
    if (positive) {
      log_a0 = LogAddExp(log_a0, log_s0);
      log_a1 = LogAddExp(log_a1, log_s1);
    } else {
      log_a0 = LogSubExp(log_a0, log_s0);
      log_a1 = LogSubExp(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30) break;
  }
  return LogAddExp(log_a0, log_a1);
}

absl::Status ValidateNoise(double z) {
  if (!(z > 0) || !std::isfinite(z)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise multiplier must be positive and finite, got ", z));
  }
  return absl::OkStatus();
}

absl::Status ValidateDelta(double delta) {
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status PrivacyBudget::Validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  return ValidateDelta(delta);
}

absl::StatusOr<SamplingConfig> SamplingConfig::ForTraining(std::int64_t num_examples,
                                                           std::int64_t batch_size,
                                                           std::int64_t epochs) {
  if (num_examples < 1 || batch_size < 1 || epochs < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "N, b and E must be positive (N=", num_examples, ", b=", batch_size,
        ", E=", epochs, ")"));
  }
  if (batch_size > num_examples) {
    return absl::InvalidArgumentError(absl::StrCat(
        "batch size ", batch_size, " exceeds training set size ", num_examples));
  }
  SamplingConfig s;
  s.sampling_rate = batch_size == num_examples
                        ? 1.0
                        : static_cast<double>(batch_size) / static_cast<double>(num_examples);
  s.steps = epochs * ((num_examples + batch_size - 1) / batch_size);
  return s;
}

absl::Status SamplingConfig::Validate() const {
  if (!(sampling_rate > 0 && sampling_rate <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", sampling_rate));
  }
  if (steps < 1) return absl::InvalidArgumentError("step count must be positive");
  return absl::OkStatus();
}

std::span<const double> DefaultOrders() { return kOrders; }

absl::StatusOr<double> RdpSingleStep(double noise_multiplier, double sampling_rate,
                                     double alpha) {
  RETURN_IF_ERROR(ValidateNoise(noise_multiplier));
  if (!(sampling_rate > 0 && sampling_rate <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", sampling_rate));
  }
  if (!(alpha > 1) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(absl::StrCat("RDP order must exceed 1, got ", alpha));
  }
  const double z = noise_multiplier;
  if (sampling_rate == 1.0) return alpha / (2.0 * z * z);

  const double lower = std::floor(alpha);
  if (lower == alpha) {
    return LogMomentInteger(z, sampling_rate, static_cast<int>(alpha)) / (alpha - 1.0);
  }
  const double log_a = LogMomentFractional(z, sampling_rate, alpha);
  return log_a / (alpha - 1.0);
}

absl::StatusOr<RdpCurve> ComputeRdp(double noise_multiplier,
                                    const SamplingConfig& sampling,
                                    std::span<const double> orders) {
  RETURN_IF_ERROR(sampling.Validate());
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (double alpha : orders) {
    ASSIGN_OR_RETURN(double rdp,
                     RdpSingleStep(noise_multiplier, sampling.sampling_rate, alpha));
    curve.values.push_back(static_cast<double>(sampling.steps) * rdp);
  }
  return curve;
}

absl::StatusOr<EpsilonAtOrder> EpsilonFromRdp(const RdpCurve& curve, double delta) {
  if (curve.orders.empty() || curve.orders.size() != curve.values.size()) {
    return absl::InvalidArgumentError("RDP curve is empty or malformed");
  }
  RETURN_IF_ERROR(ValidateDelta(delta));
  const double log_inv_delta = -std::log(delta);
  EpsilonAtOrder best{.epsilon = kInf, .order = curve.orders.front()};
  for (std::size_t k = 0; k < curve.orders.size(); ++k) {
    const double alpha = curve.orders[k];
    if (!(alpha > 1)) {
      return absl::InvalidArgumentError(absl::StrCat("RDP order must exceed 1, got ", alpha));
    }
    const double eps = curve.values[k] + log_inv_delta / (alpha - 1.0);
    if (eps < best.epsilon) best = {.epsilon = eps, .order = alpha};
  }
  return best;
}

absl::StatusOr<EpsilonAtOrder> ComputeEpsilonDetailed(std::int64_t num_examples,
                                                      std::int64_t batch_size,
                                                      std::int64_t epochs,
                                                      double noise_multiplier,
                                                      double delta) {
  ASSIGN_OR_RETURN(SamplingConfig sampling,
                   SamplingConfig::ForTraining(num_examples, batch_size, epochs));
  RETURN_IF_ERROR(ValidateDelta(delta));
  ASSIGN_OR_RETURN(RdpCurve curve, ComputeRdp(noise_multiplier, sampling));
  return EpsilonFromRdp(curve, delta);
}

absl::StatusOr<double> ComputeEpsilon(std::int64_t num_examples,
                                      std::int64_t batch_size, std::int64_t epochs,
                                      double noise_multiplier, double delta) {
  ASSIGN_OR_RETURN(EpsilonAtOrder e, ComputeEpsilonDetailed(num_examples, batch_size,
                                                            epochs, noise_multiplier,
                                                            delta));
  return e.epsilon;
}

absl::StatusOr<double> ComputeNoise(std::int64_t num_examples,
                                    std::int64_t batch_size, std::int64_t epochs,
                                    const PrivacyBudget& budget) {
  RETURN_IF_ERROR(budget.Validate());
  auto eps_at = [&](double z) {
    return ComputeEpsilon(num_examples, batch_size, epochs, z, budget.delta);
  };
  ASSIGN_OR_RETURN(double eps_ceiling, eps_at(kNoiseSearchHigh));
  if (eps_ceiling > budget.epsilon) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "infeasible privacy budget: epsilon=%g cannot be met; z=%g achieves "
        "epsilon=%.6g (N=%d, b=%d, E=%d, delta=%g)",
        budget.epsilon, kNoiseSearchHigh, eps_ceiling, num_examples, batch_size,
        epochs, budget.delta));
  }
  double lo = kNoiseSearchLow;
  double hi = kNoiseSearchHigh;
  ASSIGN_OR_RETURN(double eps_floor, eps_at(lo));
  if (eps_floor <= budget.epsilon) return lo;
  // Invariant: eps(lo) > target >= eps(hi).
  while (hi - lo > kNoiseTolerance) {
    const double mid = 0.5 * (lo + hi);
    ASSIGN_OR_RETURN(double eps, eps_at(mid));
    if (eps <= budget.epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

bool IsInfeasibleBudget(const absl::Status& status) {
  return status.code() == absl::StatusCode::kResourceExhausted;
}

}  // namespace dpsynth
