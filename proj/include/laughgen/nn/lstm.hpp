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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "laughgen/nn/params.hpp"

namespace laughgen::nn {

// Standard LSTM cell, gate rows stacked [input, forget, candidate, output]:
//   z = W x + U h_prev + b
//   c = sigmoid(z_f) * c_prev + sigmoid(z_i) * tanh(z_g)
//   h = sigmoid(z_o) * tanh(c)
struct LstmParams {
  Eigen::MatrixXd W;  // 4H x In
  Eigen::MatrixXd U;  // 4H x H
  Eigen::MatrixXd b;  // 4H x 1

  LstmParams() = default;
  LstmParams(Eigen::Index in, Eigen::Index hidden)
      : W(Eigen::MatrixXd::Zero(4 * hidden, in)),
        U(Eigen::MatrixXd::Zero(4 * hidden, hidden)),
        b(Eigen::MatrixXd::Zero(4 * hidden, 1)) {}

  Eigen::Index hidden() const { return U.cols(); }
  Eigen::Index input() const { return W.cols(); }

  // Uniform(+-1/sqrt(fan_in)) weights, zero biases except forget gate +1.
  void init(Rng& rng) {
    fill_uniform(W, 1.0 / std::sqrt(static_cast<double>(W.cols() + U.cols())), rng);
    fill_uniform(U, 1.0 / std::sqrt(static_cast<double>(W.cols() + U.cols())), rng);
    b.setZero();
    b.block(hidden(), 0, hidden(), 1).setOnes();
  }

  void append_blocks(std::vector<Block>& out, const std::string& prefix) {
    out.push_back({prefix + "W", &W});
    out.push_back({prefix + "U", &U});
    out.push_back({prefix + "b", &b});
  }

  std::vector<Block> blocks() {
    std::vector<Block> out;
    append_blocks(out, "");
    return out;
  }
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LstmState {
  Eigen::VectorXd h, c;

  static LstmState zeros(Eigen::Index hidden) {
    return {Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
  }
};

// Activated gates for one step from pre-activations z.
inline void activate_gates(Eigen::Ref<Eigen::VectorXd> z, Eigen::Index H) {
  for (Eigen::Index k = 0; k < 2 * H; ++k) z[k] = sigmoid(z[k]);
  for (Eigen::Index k = 2 * H; k < 3 * H; ++k) z[k] = std::tanh(z[k]);
  for (Eigen::Index k = 3 * H; k < 4 * H; ++k) z[k] = sigmoid(z[k]);
}

// Single step, used by autoregressive sampling.
inline LstmState lstm_step(const LstmParams& p, const Eigen::VectorXd& x, const LstmState& s) {
  const Eigen::Index H = p.hidden();
  Eigen::VectorXd z = p.W * x + p.U * s.h + p.b.col(0);
  activate_gates(z, H);
  LstmState out;
  out.c = z.segment(H, H).cwiseProduct(s.c) + z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
  out.h = z.segment(3 * H, H).cwiseProduct(out.c.array().tanh().matrix());
  return out;
}

// Everything the backward pass needs from a forward run over T steps.
struct LstmTrace {
  Eigen::MatrixXd X;       // In x T
  Eigen::MatrixXd gates;   // 4H x T, activated
  Eigen::MatrixXd C;       // H x T
  Eigen::MatrixXd tanhC;   // H x T
  Eigen::MatrixXd Hs;      // H x T
};

// Runs the cell over the columns of X from a zero state.
inline LstmTrace lstm_forward(const LstmParams& p, const Eigen::MatrixXd& X) {
  const Eigen::Index H = p.hidden(), T = X.cols();
  LstmTrace tr;
  tr.X = X;
  tr.gates.noalias() = p.W * X;
  tr.gates.colwise() += p.b.col(0);
  tr.C.resize(H, T);
  tr.tanhC.resize(H, T);
  tr.Hs.resize(H, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    auto z = tr.gates.col(t);
    if (t) z.noalias() += p.U * tr.Hs.col(t - 1);
    activate_gates(z, H);
    if (t)
      tr.C.col(t) = z.segment(H, H).cwiseProduct(tr.C.col(t - 1)) +
                    z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
    else
      tr.C.col(t) = z.segment(0, H).cwiseProduct(z.segment(2 * H, H));
    tr.tanhC.col(t) = tr.C.col(t).array().tanh();
    tr.Hs.col(t) = z.segment(3 * H, H).cwiseProduct(tr.tanhC.col(t));
  }
  return tr;
}

// Backpropagation through time. dHs holds dLoss/dh_t from above (H x T);
// parameter gradients are accumulated into grad and dLoss/dX is returned.
inline Eigen::MatrixXd lstm_backward(const LstmParams& p, const LstmTrace& tr,
                                     const Eigen::MatrixXd& dHs, LstmParams& grad) {
  const Eigen::Index H = p.hidden(), T = tr.X.cols();
  Eigen::MatrixXd dZ(4 * H, T);
  Eigen::ArrayXd dh(H), dc(H), dc_next = Eigen::ArrayXd::Zero(H);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto g = tr.gates.col(t).array();
    const auto i = g.segment(0, H), f = g.segment(H, H), cand = g.segment(2 * H, H),
               o = g.segment(3 * H, H);
    const auto tc = tr.tanhC.col(t).array();
    dh = dHs.col(t).array() + dh_next.array();
    dc = dc_next + dh * o * (1.0 - tc.square());
    auto dz = dZ.col(t).array();
    dz.segment(0, H) = dc * cand * i * (1.0 - i);
    if (t)
      dz.segment(H, H) = dc * tr.C.col(t - 1).array() * f * (1.0 - f);
    else
      dz.segment(H, H).setZero();
    dz.segment(2 * H, H) = dc * i * (1.0 - cand.square());
    dz.segment(3 * H, H) = dh * tc * o * (1.0 - o);
    dc_next = dc * f;
    if (t) dh_next.noalias() = p.U.transpose() * dZ.col(t);
  }
  grad.W.noalias() += dZ * tr.X.transpose();
  if (T > 1) grad.U.noalias() += dZ.rightCols(T - 1) * tr.Hs.leftCols(T - 1).transpose();
  grad.b.col(0) += dZ.rowwise().sum();
  return p.W.transpose() * dZ;
}

}  // namespace laughgen::nn
