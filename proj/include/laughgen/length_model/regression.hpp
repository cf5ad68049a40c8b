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
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "laughgen/length_model/design.hpp"

namespace laughgen {

inline double aic_of(double log_likelihood, int k) {
  if (k < 0) throw DomainError("AIC parameter count must be >= 0");
  return 2.0 * k - 2.0 * log_likelihood;
}

struct PoissonFit {
  Eigen::VectorXd beta;
  double log_likelihood = 0.0;
  double score_norm = 0.0;  // ||X^T (y - mu)||_inf at the returned beta
  int iterations = 0;
  std::vector<double> log_likelihood_trace;  // one entry per accepted step
};

inline constexpr double kIrlsTolerance = 1e-8;
inline constexpr int kIrlsMaxIter = 100;

inline double poisson_log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    ll += y[i] * eta[i] - std::exp(eta[i]) - std::lgamma(y[i] + 1.0);
  return ll;
}

// Log-linear Poisson MLE by iteratively reweighted least squares, with step
// halving so the log-likelihood never decreases (beyond roundoff). Converged once the score
// infinity-norm is below tol * n.
inline PoissonFit fit_poisson_irls(const DesignMatrix& X, const Eigen::VectorXd& y,
                                   double tol = kIrlsTolerance,
                                   int max_iter = kIrlsMaxIter) {
  const Eigen::Index n = X.n(), p = X.p();
  if (y.size() != n) throw DomainError("response length differs from design rows");
  if (n < p) throw DomainError("fewer observations than coefficients");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(y[i] >= 1.0) || y[i] != std::floor(y[i]))
      throw DomainError("laugh lengths must be positive integers");

  PoissonFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!is_baseline_term(X.column_labels[static_cast<std::size_t>(j)])) continue;
    double sum = 0.0, cnt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (X.rows(i, j) == 1.0) {
        sum += y[i];
        cnt += 1.0;
      }
    if (cnt > 0) fit.beta[j] = std::log(sum / cnt);
  }

  Eigen::VectorXd eta = X.rows * fit.beta;
  fit.log_likelihood = poisson_log_likelihood(y, eta);
  fit.log_likelihood_trace.push_back(fit.log_likelihood);
  const double threshold = tol * static_cast<double>(n);

  for (int iter = 0; iter <= max_iter; ++iter) {
    const Eigen::VectorXd mu = eta.array().exp();
    const Eigen::VectorXd score = X.rows.transpose() * (y - mu);
    fit.score_norm = p ? score.lpNorm<Eigen::Infinity>() : 0.0;
    fit.iterations = iter;
    if (fit.score_norm < threshold) return fit;
    if (iter == max_iter) break;

    const Eigen::MatrixXd info = X.rows.transpose() * mu.asDiagonal() * X.rows;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success)
      throw NumericError("singular weighted normal equations in Poisson IRLS");
    // Newton step; identical to the IRLS working-response solve.
    const Eigen::VectorXd step = llt.solve(score);
    if (!step.allFinite())
      throw NumericError("singular weighted normal equations in Poisson IRLS");

    double scale = 1.0;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      const Eigen::VectorXd beta = fit.beta + scale * step;
      const Eigen::VectorXd eta_new = X.rows * beta;
      const double ll = poisson_log_likelihood(y, eta_new);
      // Near the optimum the gain drops below the roundoff of the sum, so
      // ties within that noise are accepted.
      const double noise = 1e-12 * std::max(1.0, std::abs(fit.log_likelihood));
      if (std::isfinite(ll) && ll >= fit.log_likelihood - noise) {
        fit.beta = beta;
        eta = eta_new;
        fit.log_likelihood = ll;
        break;
      }
    }
    fit.log_likelihood_trace.push_back(fit.log_likelihood);
  }
  throw NumericError("Poisson IRLS did not converge in " + std::to_string(max_iter) +
                     " iterations (score norm " + std::to_string(fit.score_norm) + ")");
}

struct OlsFit {
  Eigen::VectorXd beta;
  double residual_variance = 0.0;  // RSS / n
  double log_likelihood = 0.0;
  double aic = 0.0;
};

// Gaussian log-likelihood at the MLE variance; +inf for an exact fit.
inline double gaussian_log_likelihood(double rss, Eigen::Index n) {
  const double nd = static_cast<double>(n);
  const double var = rss / nd;
  if (var <= 0.0) return std::numeric_limits<double>::infinity();
  return -0.5 * nd * (std::log(2.0 * std::numbers::pi * var) + 1.0);
}

// AIC counts the coefficients plus the estimated variance.
inline OlsFit fit_ols(const DesignMatrix& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.n(), p = X.p();
  if (y.size() != n) throw DomainError("response length differs from design rows");
  if (n <= p) throw DomainError("OLS needs more observations than coefficients");
  OlsFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = y;
  if (p > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.rows);
    if (qr.rank() < p) throw NumericError("rank-deficient design in OLS fit");
    fit.beta = qr.solve(y);
    resid = y - X.rows * fit.beta;
  }
  const double rss = resid.squaredNorm();
  // Exact-fit residue below roundoff is treated as zero.
  const double rss_floor = 1e-24 * std::max(1.0, y.squaredNorm());
  fit.residual_variance = rss <= rss_floor ? 0.0 : rss / static_cast<double>(n);
  fit.log_likelihood = gaussian_log_likelihood(rss <= rss_floor ? 0.0 : rss, n);
  fit.aic = aic_of(fit.log_likelihood, static_cast<int>(p) + 1);
  return fit;
}

}  // namespace laughgen
