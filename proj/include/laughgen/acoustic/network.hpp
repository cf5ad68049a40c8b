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
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "laughgen/core/error.hpp"
#include "laughgen/core/rng.hpp"
#include "laughgen/nn/lstm.hpp"
#include "laughgen/nn/params.hpp"

namespace laughgen {

struct BiLstmDims {
  Eigen::Index input = 0;
  Eigen::Index hidden = 128;
  int layers = 3;
  Eigen::Index output = 0;
};

// Stacked bidirectional LSTM with a linear head over the concatenated
// forward and backward states of the top layer.
struct BiLstmParams {
  std::vector<nn::LstmParams> fwd, bwd;
  Eigen::MatrixXd out_w;  // output x 2H
  Eigen::MatrixXd out_b;  // output x 1

  std::vector<nn::Block> blocks() {
    std::vector<nn::Block> out;
    for (std::size_t l = 0; l < fwd.size(); ++l) {
      fwd[l].append_blocks(out, "layer" + std::to_string(l) + ".fwd.");
      bwd[l].append_blocks(out, "layer" + std::to_string(l) + ".bwd.");
    }
    out.push_back({"output.W", &out_w});
    out.push_back({"output.b", &out_b});
    return out;
  }
};

inline BiLstmParams init_bilstm(const BiLstmDims& d, Rng& rng) {
  if (d.input < 1 || d.hidden < 1 || d.layers < 1 || d.output < 1)
    throw DomainError("recurrent regressor dimensions must be positive");
  BiLstmParams p;
  for (int l = 0; l < d.layers; ++l) {
    const Eigen::Index in = l ? 2 * d.hidden : d.input;
    p.fwd.emplace_back(in, d.hidden);
    p.bwd.emplace_back(in, d.hidden);
    p.fwd.back().init(rng);
    p.bwd.back().init(rng);
  }
  p.out_w.resize(d.output, 2 * d.hidden);
  nn::fill_uniform(p.out_w, 1.0 / std::sqrt(2.0 * static_cast<double>(d.hidden)), rng);
  p.out_b = Eigen::MatrixXd::Zero(d.output, 1);
  return p;
}

inline Eigen::MatrixXd reverse_cols(const Eigen::MatrixXd& m) { return m.rowwise().reverse(); }

struct BiLstmTrace {
  std::vector<nn::LstmTrace> f, b;
  Eigen::MatrixXd top;  // 2H x T
  Eigen::MatrixXd y;    // output x T
};

inline BiLstmTrace bilstm_forward(const BiLstmParams& p, const Eigen::MatrixXd& X) {
  BiLstmTrace tr;
  Eigen::MatrixXd in = X;
  for (std::size_t l = 0; l < p.fwd.size(); ++l) {
    tr.f.push_back(nn::lstm_forward(p.fwd[l], in));
    tr.b.push_back(nn::lstm_forward(p.bwd[l], reverse_cols(in)));
    const auto H = p.fwd[l].hidden();
    Eigen::MatrixXd out(2 * H, X.cols());
    out.topRows(H) = tr.f.back().Hs;
    out.bottomRows(H) = reverse_cols(tr.b.back().Hs);
    in = std::move(out);
  }
  tr.top = std::move(in);
  tr.y = p.out_w * tr.top;
  tr.y.colwise() += p.out_b.col(0);
  return tr;
}

// Accumulates parameter gradients for dLoss/dy into grad.
inline void bilstm_backward(const BiLstmParams& p, const BiLstmTrace& tr, const Eigen::MatrixXd& dy,
                            BiLstmParams& grad) {
  grad.out_w.noalias() += dy * tr.top.transpose();
  grad.out_b.col(0) += dy.rowwise().sum();
  Eigen::MatrixXd dH = p.out_w.transpose() * dy;
  for (std::size_t l = p.fwd.size(); l-- > 0;) {
    const auto H = p.fwd[l].hidden();
    const Eigen::MatrixXd dXf = nn::lstm_backward(p.fwd[l], tr.f[l], dH.topRows(H), grad.fwd[l]);
    const Eigen::MatrixXd dXb =
        nn::lstm_backward(p.bwd[l], tr.b[l], reverse_cols(dH.bottomRows(H)), grad.bwd[l]);
    if (l) dH = dXf + reverse_cols(dXb);
  }
}

// Half the summed squared error, optionally weighted per output row;
// gradient accumulated into grad if non-null.
inline double bilstm_sse(const BiLstmParams& p, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         BiLstmParams* grad, const Eigen::VectorXd& weights = {}) {
  const auto tr = bilstm_forward(p, X);
  Eigen::MatrixXd err = tr.y - Y;
  double sse = err.squaredNorm();
  if (weights.size()) {
    err = err.array().colwise() * weights.array();
    sse = (err.array() * (tr.y - Y).array()).sum();
  }
  if (grad) bilstm_backward(p, tr, err, *grad);
  return 0.5 * sse;
}

// Per-row affine standardisation. Rows with (near) zero spread keep scale 1.
struct Standardizer {
  Eigen::VectorXd mean, scale;

  static Standardizer identity(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  }

  static Standardizer fit(const std::vector<Eigen::MatrixXd>& data) {
    const Eigen::Index dim = data.at(0).rows();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim), sq = Eigen::VectorXd::Zero(dim);
    double n = 0.0;
    for (const auto& m : data) {
      sum += m.rowwise().sum();
      sq += m.array().square().matrix().rowwise().sum();
      n += static_cast<double>(m.cols());
    }
    Standardizer s{sum / n, Eigen::VectorXd::Ones(dim)};
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double var = std::max(0.0, sq[i] / n - s.mean[i] * s.mean[i]);
      if (var > 1e-12) s.scale[i] = std::sqrt(var);
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const {
    return (m.colwise() - mean).array().colwise() / scale.array();
  }
  Eigen::MatrixXd invert(const Eigen::MatrixXd& m) const {
    return (m.array().colwise() * scale.array()).matrix().colwise() + mean;
  }
};

struct SeqRegressor {
  BiLstmDims dims;
  BiLstmParams params;
  Standardizer input, output;

  static SeqRegressor create(const BiLstmDims& d, std::uint64_t seed) {
    Rng rng(seed);
    return {d, init_bilstm(d, rng), Standardizer::identity(d.input),
            Standardizer::identity(d.output)};
  }

  Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const {
    if (X.rows() != dims.input)
      throw DomainError("regressor expects " + std::to_string(dims.input) + "-dim inputs, got " +
                        std::to_string(X.rows()));
    return output.invert(bilstm_forward(params, input.apply(X)).y);
  }
};

struct RegressorTrainingConfig {
  int epochs = 100;
  double learning_rate = 1e-3;
  double gradient_clip_norm = 5.0;
  std::uint64_t seed = 0;
  std::size_t batch_size = 8;
  bool standardize_output = true;
  // Per-output loss weights; empty means uniform.
  Eigen::VectorXd loss_weights;
  // Stop once the mean standardised training MSE falls below this.
  std::optional<double> stop_at_mse;
};

struct RegressorTrainingResult {
  std::vector<double> mse_trace;  // weighted mean squared error per entry, standardised units
  Eigen::VectorXd per_dim_mse;
  int epochs_run = 0;
};

inline Eigen::VectorXd per_dim_mse(const SeqRegressor& r, const std::vector<Eigen::MatrixXd>& X,
                                   const std::vector<Eigen::MatrixXd>& Y) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(r.dims.output);
  double n = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Eigen::MatrixXd err =
        bilstm_forward(r.params, r.input.apply(X[i])).y - r.output.apply(Y[i]);
    acc += err.array().square().matrix().rowwise().sum();
    n += static_cast<double>(X[i].cols());
  }
  return acc / n;
}

// Minibatch Adam on sequences; the standardisers are fitted on the data
// before the first epoch.
inline RegressorTrainingResult train_regressor(SeqRegressor& r, const std::vector<Eigen::MatrixXd>& X,
                                               const std::vector<Eigen::MatrixXd>& Y,
                                               const RegressorTrainingConfig& cfg) {
  if (X.empty() || X.size() != Y.size()) throw DomainError("need paired, non-empty training data");
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0) || !(cfg.gradient_clip_norm > 0) ||
      cfg.batch_size < 1)
    throw DomainError("training hyperparameters must be positive");
  if (cfg.loss_weights.size() && cfg.loss_weights.size() != r.dims.output)
    throw DomainError("need one loss weight per output");
  for (std::size_t i = 0; i < X.size(); ++i)
    if (X[i].rows() != r.dims.input || Y[i].rows() != r.dims.output || X[i].cols() != Y[i].cols())
      throw DomainError("training sequence " + std::to_string(i) + " has mismatched dimensions");
  r.input = Standardizer::fit(X);
  r.output = cfg.standardize_output ? Standardizer::fit(Y) : Standardizer::identity(r.dims.output);
  std::vector<Eigen::MatrixXd> xs, ys;
  for (std::size_t i = 0; i < X.size(); ++i) {
    xs.push_back(r.input.apply(X[i]));
    ys.push_back(r.output.apply(Y[i]));
  }

  RegressorTrainingResult res;
  nn::Adam<BiLstmParams> adam(r.params, {cfg.learning_rate});
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double sse = 0.0, entries = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      auto grad = nn::zeros_like(r.params);
      double batch_entries = 0.0;
      for (std::size_t k = start; k < std::min(order.size(), start + cfg.batch_size); ++k) {
        const auto i = order[k];
        sse += 2.0 * bilstm_sse(r.params, xs[i], ys[i], &grad, cfg.loss_weights);
        batch_entries += static_cast<double>(ys[i].size());
      }
      entries += batch_entries;
      nn::scale(grad, 1.0 / batch_entries);
      nn::clip_global_norm(grad, cfg.gradient_clip_norm);
      adam.step(r.params, grad);
    }
    if (!std::isfinite(sse) || !nn::all_finite(r.params))
      throw NumericError("recurrent regressor diverged at epoch " + std::to_string(epoch));
    res.epochs_run = epoch + 1;
    // Loss accumulated during the epoch, i.e. before each batch's update.
    res.mse_trace.push_back(sse / entries);
    if (cfg.stop_at_mse && res.mse_trace.back() < *cfg.stop_at_mse) break;
  }
  res.per_dim_mse = per_dim_mse(r, X, Y);
  return res;
}

inline nlohmann::json to_json(SeqRegressor r) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"dims",
           {{"input", r.dims.input}, {"hidden", r.dims.hidden}, {"layers", r.dims.layers},
            {"output", r.dims.output}}},
          {"input_mean", vec(r.input.mean)},
          {"input_scale", vec(r.input.scale)},
          {"output_mean", vec(r.output.mean)},
          {"output_scale", vec(r.output.scale)},
          {"weights", nn::blocks_to_json(r.params)}};
}

inline SeqRegressor seq_regressor_from_json(const nlohmann::json& j) {
  const auto& d = j.at("dims");
  BiLstmDims dims{d.at("input").get<Eigen::Index>(), d.at("hidden").get<Eigen::Index>(),
                  d.at("layers").get<int>(), d.at("output").get<Eigen::Index>()};
  auto r = SeqRegressor::create(dims, 0);
  auto vec = [&](const char* key, Eigen::Index n) {
    const auto v = j.at(key).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(v.size()) != n) throw ParseError(std::string(key) + " has the wrong size");
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), n));
  };
  r.input = {vec("input_mean", dims.input), vec("input_scale", dims.input)};
  r.output = {vec("output_mean", dims.output), vec("output_scale", dims.output)};
  nn::blocks_from_json(r.params, j.at("weights"));
  return r;
}

}  // namespace laughgen
