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

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "laughgen/core/error.hpp"

namespace laughgen {

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("pearson_r needs equally long samples");
  if (x.size() < 3) throw DomainError("pearson_r needs at least 3 pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DomainError("pearson_r: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct WilliamsResult {
  double statistic = 0.0;
  double p_two_sided = 1.0;
  double df = 0.0;
};

// Williams' t for r12 vs r13, both sharing variable 1; r23 links 2 and 3.
inline WilliamsResult williams_t(double r12, double r13, double r23, int n) {
  for (double r : {r12, r13, r23})
    if (!(std::abs(r) <= 1.0)) throw DomainError("correlations must lie in [-1, 1]");
  if (n <= 3) throw DomainError("williams_t needs n > 3");
  const double det = 1.0 - (r12 * r12 + r13 * r13) - r23 * r23 + 2.0 * (r12 * r13) * r23;
  if (!(det > 0.0)) throw DomainError("degenerate correlation matrix in williams_t");
  const double nm1 = n - 1.0;
  const double rbar = 0.5 * (r12 + r13);
  const double denom = 2.0 * (nm1 / (n - 3.0)) * det + rbar * rbar * std::pow(1.0 - r23, 3);
  WilliamsResult w;
  w.df = n - 3.0;
  w.statistic = (r12 - r13) * std::sqrt(nm1 * (1.0 + r23) / denom);
  const boost::math::students_t dist(w.df);
  w.p_two_sided = w.statistic == 0.0
                      ? 1.0
                      : 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(w.statistic)));
  return w;
}

}  // namespace laughgen
