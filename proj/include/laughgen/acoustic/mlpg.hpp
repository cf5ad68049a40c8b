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
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "laughgen/acoustic/features.hpp"
#include "laughgen/core/error.hpp"

namespace laughgen {

// Window taps at offsets -1, 0, +1; neighbours beyond the ends replicate
// the edge frame.
inline constexpr std::array<std::array<double, 3>, 3> kWindows{{
    {0.0, 1.0, 0.0},
    {-0.5, 0.0, 0.5},
    {1.0, -2.0, 1.0},
}};

inline Eigen::Index clamp_frame(Eigen::Index t, Eigen::Index T) {
  return std::clamp<Eigen::Index>(t, 0, T - 1);
}

// Dense 3T x T matrix mapping a static trajectory to [static, delta,
// delta-delta] rows interleaved per frame.
inline Eigen::MatrixXd window_matrix(Eigen::Index T) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(3 * T, T);
  for (Eigen::Index t = 0; t < T; ++t)
    for (int k = 0; k < 3; ++k)
      for (int j = -1; j <= 1; ++j) W(3 * t + k, clamp_frame(t + j, T)) += kWindows[k][j + 1];
  return W;
}

// T x 3 [static, delta, delta-delta] of one trajectory.
inline Eigen::MatrixXd apply_windows(const Eigen::VectorXd& c) {
  const Eigen::Index T = c.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, 3);
  for (Eigen::Index t = 0; t < T; ++t)
    for (int k = 0; k < 3; ++k)
      for (int j = -1; j <= 1; ++j) out(t, k) += kWindows[k][j + 1] * c[clamp_frame(t + j, T)];
  return out;
}

// Solves W' P W c = W' P mu where P = diag(precision). means and precision
// are T x 3. The normal matrix is pentadiagonal and solved by banded Cholesky.
inline Eigen::VectorXd mlpg_solve(const Eigen::MatrixXd& means, const Eigen::MatrixXd& precision) {
  const Eigen::Index T = means.rows();
  if (T < 1 || means.cols() != 3 || precision.rows() != T || precision.cols() != 3)
    throw DomainError("mlpg needs T x 3 means and precisions with T >= 1");
  if (!(precision.array() > 0.0).all() || !precision.allFinite() || !means.allFinite())
    throw DomainError("mlpg precisions must be positive and inputs finite");

  // band(t, j) = A(t, t + j), j = 0, 1, 2
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(T, 3);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(T);
  for (Eigen::Index t = 0; t < T; ++t)
    for (int k = 0; k < 3; ++k) {
      std::array<Eigen::Index, 3> idx{};
      std::array<double, 3> w{};
      int n = 0;
      for (int j = -1; j <= 1; ++j) {
        const double tap = kWindows[k][j + 1];
        if (tap == 0.0) continue;
        const auto col = clamp_frame(t + j, T);
        int slot = 0;
        while (slot < n && idx[slot] != col) ++slot;
        if (slot == n) {
          idx[n] = col;
          w[n++] = 0.0;
        }
        w[slot] += tap;
      }
      const double p = precision(t, k);
      for (int a = 0; a < n; ++a) {
        rhs[idx[a]] += p * w[a] * means(t, k);
        for (int b = 0; b < n; ++b)
          if (idx[b] >= idx[a]) band(idx[a], idx[b] - idx[a]) += p * w[a] * w[b];
      }
    }

  // In-place banded Cholesky: band becomes L' rows, L(t + j, t) = band(t, j).
  for (Eigen::Index t = 0; t < T; ++t) {
    double d = band(t, 0);
    for (Eigen::Index j = 1; j <= 2 && t - j >= 0; ++j) d -= band(t - j, j) * band(t - j, j);
    if (!(d > 0.0)) throw NumericError("mlpg normal matrix is not positive definite");
    band(t, 0) = std::sqrt(d);
    for (Eigen::Index j = 1; j <= 2 && t + j < T; ++j) {
      double v = band(t, j);
      for (Eigen::Index m = 1; m + j <= 2 && t - m >= 0; ++m) v -= band(t - m, m) * band(t - m, m + j);
      band(t, j) = v / band(t, 0);
    }
  }
  Eigen::VectorXd y(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    double v = rhs[t];
    for (Eigen::Index j = 1; j <= 2 && t - j >= 0; ++j) v -= band(t - j, j) * y[t - j];
    y[t] = v / band(t, 0);
  }
  Eigen::VectorXd c(T);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    double v = y[t];
    for (Eigen::Index j = 1; j <= 2 && t + j < T; ++j) v -= band(t, j) * c[t + j];
    c[t] = v / band(t, 0);
  }
  return c;
}

// Per-dimension variances shared by all frames.
inline Eigen::VectorXd mlpg_smooth(const Eigen::MatrixXd& means, const Eigen::Vector3d& variances) {
  if (!(variances.array() > 0.0).all()) throw DomainError("mlpg variances must be positive");
  Eigen::MatrixXd precision(means.rows(), 3);
  for (int k = 0; k < 3; ++k) precision.col(k).setConstant(1.0 / variances[k]);
  return mlpg_solve(means, precision);
}

// Fills the delta and delta-delta rows of a track from its statics.
inline void fill_deltas(FeatureTrack& f) {
  for (Eigen::Index d = 0; d < kStaticDim; ++d) {
    const Eigen::MatrixXd o = apply_windows(f.frames.row(d).transpose());
    f.frames.row(kStaticDim + d) = o.col(1).transpose();
    f.frames.row(2 * kStaticDim + d) = o.col(2).transpose();
  }
}

// Replaces every static stream by its MLPG trajectory; variances holds
// 3 * kStaticDim entries in frame layout order.
inline void smooth_track(FeatureTrack& f, const Eigen::VectorXd& variances) {
  if (variances.size() < 3 * kStaticDim) throw DomainError("need a variance per static/delta row");
  for (Eigen::Index d = 0; d < kStaticDim; ++d) {
    Eigen::MatrixXd means(f.size(), 3);
    means.col(0) = f.frames.row(d).transpose();
    means.col(1) = f.frames.row(kStaticDim + d).transpose();
    means.col(2) = f.frames.row(2 * kStaticDim + d).transpose();
    const Eigen::Vector3d v(variances[d], variances[kStaticDim + d], variances[2 * kStaticDim + d]);
    f.frames.row(d) = mlpg_smooth(means, v).transpose();
  }
  fill_deltas(f);
  clamp_unit_fields(f);
}

}  // namespace laughgen
