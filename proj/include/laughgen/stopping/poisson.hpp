// Copyright 2026 The laughgen Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "laughgen/core/error.hpp"
#include "laughgen/core/rng.hpp"

namespace laughgen {

namespace detail {
inline void check_poisson_args(long long k, double lambda) {
  if (k < 0) throw DomainError("Poisson support starts at 0, got " + std::to_string(k));
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("Poisson rate must be finite and > 0");
}
}  // namespace detail

inline double poisson_log_pmf(long long k, double lambda) {
  detail::check_poisson_args(k, lambda);
  const double kd = static_cast<double>(k);
  return kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0);
}

inline double poisson_pmf(long long k, double lambda) {
  return std::exp(poisson_log_pmf(k, lambda));
}

// F(k) = Q(k + 1, lambda), the regularized upper incomplete gamma.
inline double poisson_cdf(long long k, double lambda) {
  detail::check_poisson_args(k, lambda);
  return boost::math::gamma_q(static_cast<double>(k) + 1.0, lambda);
}

// 1 - F(k - 1) = P(k, lambda) for k >= 1, without cancellation.
inline double poisson_survival(long long k, double lambda) {
  detail::check_poisson_args(k, lambda);
  if (k == 0) return 1.0;
  return boost::math::gamma_p(static_cast<double>(k), lambda);
}

inline constexpr double kSurvivalFloor = 1e-300;

// Hazard that the n-th phone is the last: f(n) / (1 - F(n - 1)).
inline double p_end(long long n, double lambda) {
  if (n < 1) throw DomainError("p_end position must be >= 1");
  const double tail = poisson_survival(n, lambda);
  if (tail < kSurvivalFloor) return 1.0;
  const double h = poisson_pmf(n, lambda) / tail;
  return h > 1.0 ? 1.0 : h;
}

// Mean of Poisson(lambda) conditioned on >= 1.
inline double zero_truncated_mean(double lambda) {
  return lambda / -std::expm1(-lambda);
}

struct StoppingRule {
  double lambda;

  explicit StoppingRule(double l) : lambda(l) {
    if (!(l > 0.0) || !std::isfinite(l))
      throw DomainError("stopping rule needs finite lambda > 0");
  }
};

inline bool draw_end(const StoppingRule& rule, long long n, Rng& rng) {
  return rng.uniform() < p_end(n, rule.lambda);
}

// Length induced by repeated end draws.
inline long long sample_length(const StoppingRule& rule, Rng& rng) {
  long long n = 1;
  while (!draw_end(rule, n, rng)) ++n;
  return n;
}

}  // namespace laughgen
