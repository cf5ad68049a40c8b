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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "laughgen/core/error.hpp"
#include "laughgen/core/rng.hpp"

namespace laughgen::nn {

// Named view of one parameter matrix. Models expose their parameters as a
// list of blocks so optimisers, gradient checks and serialisers can treat
// them uniformly.
struct Block {
  std::string name;
  Eigen::MatrixXd* value;
};

struct ConstBlock {
  std::string name;
  const Eigen::MatrixXd* value;
};

template <typename P>
concept ParameterSet = requires(P p) {
  { p.blocks() } -> std::same_as<std::vector<Block>>;
};

template <ParameterSet P>
P zeros_like(const P& p) {
  P z = p;
  for (auto& b : z.blocks()) b.value->setZero();
  return z;
}

template <ParameterSet P>
double squared_norm(P& p) {
  double s = 0.0;
  for (auto& b : p.blocks()) s += b.value->squaredNorm();
  return s;
}

template <ParameterSet P>
bool all_finite(P& p) {
  for (auto& b : p.blocks())
    if (!b.value->allFinite()) return false;
  return true;
}

template <ParameterSet P>
void scale(P& p, double s) {
  for (auto& b : p.blocks()) *b.value *= s;
}

// Rescales g in place so its global L2 norm is at most max_norm.
// Returns the norm before clipping.
template <ParameterSet P>
double clip_global_norm(P& g, double max_norm) {
  const double norm = std::sqrt(squared_norm(g));
  if (max_norm > 0.0 && norm > max_norm) scale(g, max_norm / norm);
  return norm;
}

inline void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-bound, bound);
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction; moment buffers mirror the parameter blocks.
template <ParameterSet P>
class Adam {
 public:
  Adam(const P& params, AdamConfig cfg) : cfg_(cfg), m_(zeros_like(params)), v_(zeros_like(params)) {}

  void step(P& params, P& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    auto pb = params.blocks();
    auto gb = grad.blocks();
    auto mb = m_.blocks();
    auto vb = v_.blocks();
    for (std::size_t k = 0; k < pb.size(); ++k) {
      auto& m = *mb[k].value;
      auto& v = *vb[k].value;
      const auto& g = *gb[k].value;
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
      pb[k].value->array() -=
          cfg_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
    }
  }

  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  P m_, v_;
  long t_ = 0;
};

struct GradCheckReport {
  std::map<std::string, double> block_error;  // max relative error per block
  double max_error = 0.0;
  std::size_t checked = 0;
};

// Entries with |analytic| and |numeric| below this are compared absolutely.
inline constexpr double kGradCheckFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
}

// Central finite differences over every entry of every block. loss(p, grad)
// must return the scalar loss and, when grad is non-null, accumulate the
// analytic gradient into it.
template <ParameterSet P>
GradCheckReport gradient_check(P params, const std::function<double(const P&, P*)>& loss,
                               double step = 1e-5) {
  P analytic = zeros_like(params);
  loss(params, &analytic);
  GradCheckReport r;
  auto pb = params.blocks();
  auto ab = analytic.blocks();
  for (std::size_t k = 0; k < pb.size(); ++k) {
    double worst = 0.0;
    auto& m = *pb[k].value;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double orig = m(i, j);
        m(i, j) = orig + step;
        const double up = loss(params, nullptr);
        m(i, j) = orig - step;
        const double down = loss(params, nullptr);
        m(i, j) = orig;
        const double numeric = (up - down) / (2.0 * step);
        worst = std::max(worst, relative_error((*ab[k].value)(i, j), numeric));
        ++r.checked;
      }
    r.block_error[pb[k].name] = std::max(r.block_error[pb[k].name], worst);
    r.max_error = std::max(r.max_error, worst);
  }
  return r;
}

// Weight blocks as nested row arrays.
inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd m(r, c);
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != r) throw ParseError("weight block row count mismatch");
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = data.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) throw ParseError("weight block column mismatch");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

template <ParameterSet P>
nlohmann::json blocks_to_json(P& p) {
  nlohmann::json j = nlohmann::json::object();
  for (auto& b : p.blocks()) j[b.name] = matrix_to_json(*b.value);
  return j;
}

// Loads into a parameter set that already has the expected shapes.
template <ParameterSet P>
void blocks_from_json(P& p, const nlohmann::json& j) {
  for (auto& b : p.blocks()) {
    if (!j.contains(b.name)) throw ParseError("missing weight block '" + b.name + "'");
    auto m = matrix_from_json(j.at(b.name));
    if (m.rows() != b.value->rows() || m.cols() != b.value->cols())
      throw ParseError("weight block '" + b.name + "' has the wrong shape");
    if (!m.allFinite()) throw ParseError("weight block '" + b.name + "' is not finite");
    *b.value = std::move(m);
  }
}

}  // namespace laughgen::nn
