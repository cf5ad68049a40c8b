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
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "laughgen/corpus/corpus.hpp"
#include "laughgen/length_model/length_model.hpp"
#include "laughgen/nn/lstm.hpp"
#include "laughgen/nn/params.hpp"
#include "laughgen/stopping/poisson.hpp"

namespace laughgen {

// Per-step input: phone embedding (or BOS) + P_end(n) + speaker + 2 emotion.
struct PhonesDims {
  Eigen::Index embed = 64;
  Eigen::Index hidden = 128;
  Eigen::Index input() const { return embed + 4; }
};

struct PhonesParams {
  Eigen::MatrixXd embedding;  // embed x |inventory|, one column per phone
  Eigen::MatrixXd bos;        // embed x 1
  nn::LstmParams cell;
  Eigen::MatrixXd out_w;      // |inventory| x hidden
  Eigen::MatrixXd out_b;      // |inventory| x 1

  std::vector<nn::Block> blocks() {
    std::vector<nn::Block> out{{"embedding", &embedding}, {"bos", &bos}};
    cell.append_blocks(out, "lstm.");
    out.push_back({"output.W", &out_w});
    out.push_back({"output.b", &out_b});
    return out;
  }
};

struct PhonesModel {
  PhoneInventory inventory;
  PhonesDims dims;
  PhonesParams params;
  bool mask_emotion = false;
  LengthModel length_model;  // lambda source for P_end during generation
  int version = 1;
};

inline PhonesModel init_params(const PhoneInventory& inventory, std::uint64_t seed,
                               PhonesDims dims = {}) {
  if (inventory.size() < 2) throw DomainError("phones generator needs >= 2 phones");
  const auto V = static_cast<Eigen::Index>(inventory.size());
  PhonesModel m;
  m.inventory = inventory;
  m.dims = dims;
  Rng rng(seed);
  auto& p = m.params;
  p.embedding.resize(dims.embed, V);
  p.bos.resize(dims.embed, 1);
  nn::fill_uniform(p.embedding, 1.0 / std::sqrt(static_cast<double>(V)), rng);
  nn::fill_uniform(p.bos, 1.0 / std::sqrt(static_cast<double>(V)), rng);
  p.cell = nn::LstmParams(dims.input(), dims.hidden);
  p.cell.init(rng);
  p.out_w.resize(V, dims.hidden);
  nn::fill_uniform(p.out_w, 1.0 / std::sqrt(static_cast<double>(dims.hidden)), rng);
  p.out_b = Eigen::MatrixXd::Zero(V, 1);
  return m;
}

// Speaker, emotion and length rate shared by every step of a sequence.
struct Conditioning {
  double speaker_code = 0.0;
  EmotionPoint emotion;
  double lambda = 1.0;
};

struct StepInput {
  Eigen::VectorXd phone_embedding;
  double p_end_feature = 0.0;
  double speaker_code = 0.0;
  EmotionPoint emotion;

  Eigen::VectorXd concat() const {
    Eigen::VectorXd x(phone_embedding.size() + 4);
    x << phone_embedding, p_end_feature, speaker_code, emotion.pleasantness, emotion.arousal;
    return x;
  }
};

inline Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double mx = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - mx).exp();
  return e / e.sum();
}

struct StepOutput {
  Eigen::VectorXd probs;
  nn::LstmState state;
};

inline StepOutput forward_step(const PhonesModel& m, const StepInput& x,
                               const nn::LstmState& state, double temperature = 1.0) {
  if (x.phone_embedding.size() != m.dims.embed)
    throw DomainError("step input embedding has the wrong dimension");
  const Eigen::VectorXd in = x.concat();
  if (!in.allFinite()) throw DomainError("non-finite step input");
  StepOutput out;
  out.state = nn::lstm_step(m.params.cell, in, state);
  out.probs = softmax((m.params.out_w * out.state.h + m.params.out_b.col(0)) / temperature);
  return out;
}

// Conditioning as seen by a model: masked models see neutral emotion and the
// lambda of neutral emotion.
inline Conditioning make_conditioning(const SpeakerId& s, EmotionPoint e,
                                      const LengthModel& lengths, bool mask_emotion) {
  if (mask_emotion) e = EmotionPoint{};
  return {s.code, e, predict_lambda(lengths, s, e)};
}

// Teacher-forced step inputs for a target sequence (In x T).
inline Eigen::MatrixXd teacher_inputs(const PhonesParams& params,
                                      const std::vector<std::size_t>& ids,
                                      const Conditioning& cond) {
  const auto T = static_cast<Eigen::Index>(ids.size());
  const auto E = params.embedding.rows();
  Eigen::MatrixXd X(E + 4, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    X.col(t).head(E) = t ? params.embedding.col(static_cast<Eigen::Index>(ids[t - 1]))
                         : params.bos.col(0);
    X(E, t) = p_end(t + 1, cond.lambda);
    X(E + 1, t) = cond.speaker_code;
    X(E + 2, t) = cond.emotion.pleasantness;
    X(E + 3, t) = cond.emotion.arousal;
  }
  return X;
}

inline std::vector<std::size_t> phone_ids(const PhonesModel& m,
                                          const std::vector<PhoneToken>& phones) {
  std::vector<std::size_t> ids;
  ids.reserve(phones.size());
  for (const auto& p : phones) ids.push_back(m.inventory.index_of(p));
  return ids;
}

struct SequenceScore {
  double nll_sum = 0.0;
  std::size_t correct = 0;  // argmax == target
  std::size_t steps = 0;
};

// Summed teacher-forced NLL of ids under params; accumulates the exact BPTT
// gradient into grad when it is non-null.
inline SequenceScore sequence_loss(const PhonesModel& m, const PhonesParams& params,
                                   const std::vector<std::size_t>& ids, const Conditioning& cond,
                                   PhonesParams* grad) {
  SequenceScore s;
  if (ids.empty()) return s;
  const Eigen::MatrixXd X = teacher_inputs(params, ids, cond);
  const auto tr = nn::lstm_forward(params.cell, X);
  Eigen::MatrixXd logits = params.out_w * tr.Hs;
  logits.colwise() += params.out_b.col(0);
  const auto T = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd dlogits(logits.rows(), T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::VectorXd p = softmax(logits.col(t));
    const auto target = static_cast<Eigen::Index>(ids[static_cast<std::size_t>(t)]);
    s.nll_sum -= std::log(p[target]);
    Eigen::Index arg;
    p.maxCoeff(&arg);
    s.correct += arg == target;
    dlogits.col(t) = p;
    dlogits(target, t) -= 1.0;
  }
  s.steps = ids.size();
  if (!grad) return s;

  grad->out_w.noalias() += dlogits * tr.Hs.transpose();
  grad->out_b.col(0) += dlogits.rowwise().sum();
  const Eigen::MatrixXd dH = params.out_w.transpose() * dlogits;
  const Eigen::MatrixXd dX = nn::lstm_backward(params.cell, tr, dH, grad->cell);
  const auto E = m.dims.embed;
  grad->bos.col(0) += dX.col(0).head(E);
  for (Eigen::Index t = 1; t < T; ++t)
    grad->embedding.col(static_cast<Eigen::Index>(ids[static_cast<std::size_t>(t - 1)])) +=
        dX.col(t).head(E);
  return s;
}

// Mean per-phone NLL under teacher forcing.
inline double sequence_nll(const PhonesModel& m, const std::vector<PhoneToken>& phones,
                           const Conditioning& cond) {
  if (phones.empty()) throw DomainError("empty phone sequence");
  const auto s = sequence_loss(m, m.params, phone_ids(m, phones), cond, nullptr);
  return s.nll_sum / static_cast<double>(s.steps);
}

struct TrainingConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  double gradient_clip_norm = 5.0;
  std::uint64_t seed = 0;
  bool mask_emotion = false;
  std::size_t batch_size = 16;
  // Stop early once teacher-forced accuracy on the training set reaches this.
  std::optional<double> stop_at_accuracy;
};

struct TrainingExample {
  std::vector<std::size_t> ids;
  Conditioning cond;
};

inline std::vector<TrainingExample> make_examples(const PhonesModel& m, const Corpus& c,
                                                  const LengthModel& lengths, bool mask) {
  std::vector<TrainingExample> out;
  for (const auto& e : c.episodes)
    out.push_back({phone_ids(m, canonical_phones(e, c.inventory)),
                   make_conditioning(e.speaker, emotion_of(e), lengths, mask)});
  return out;
}

struct DatasetScore {
  double mean_nll = 0.0;
  double accuracy = 0.0;
  std::size_t phones = 0;
};

inline DatasetScore score_examples(const PhonesModel& m, const std::vector<TrainingExample>& ex) {
  double nll = 0.0;
  std::size_t correct = 0, steps = 0;
  for (const auto& x : ex) {
    const auto s = sequence_loss(m, m.params, x.ids, x.cond, nullptr);
    nll += s.nll_sum;
    correct += s.correct;
    steps += s.steps;
  }
  if (!steps) return {};
  return {nll / static_cast<double>(steps), static_cast<double>(correct) / steps, steps};
}

struct TrainingResult {
  PhonesModel model;
  std::vector<double> nll_trace;  // training-set mean NLL after each epoch
  int epochs_run = 0;
  DatasetScore initial, final;
};

// Minibatch Adam over teacher-forced episodes with global-norm clipping.
// Masked training feeds neutral emotion and needs a baselines-only length
// model.
inline TrainingResult train(PhonesModel init, const Corpus& corpus, const LengthModel& lengths,
                            const TrainingConfig& cfg) {
  if (cfg.epochs < 0 || !(cfg.learning_rate > 0) || !(cfg.gradient_clip_norm > 0) ||
      cfg.batch_size < 1)
    throw DomainError("training hyperparameters must be positive");
  if (corpus.episodes.empty()) throw DomainError("cannot train on an empty corpus");
  if (cfg.mask_emotion && lengths.has_emotion_terms())
    throw DomainError("emotion-masked training needs a baselines-only length model");

  TrainingResult r;
  r.model = std::move(init);
  r.model.mask_emotion = cfg.mask_emotion;
  r.model.length_model = lengths;
  auto& model = r.model;
  const auto examples = make_examples(model, corpus, lengths, cfg.mask_emotion);
  r.initial = score_examples(model, examples);

  nn::Adam<PhonesParams> adam(model.params, {cfg.learning_rate});
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      auto grad = nn::zeros_like(model.params);
      std::size_t steps = 0;
      const auto end = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = examples[order[k]];
        steps += sequence_loss(model, model.params, ex.ids, ex.cond, &grad).steps;
      }
      nn::scale(grad, 1.0 / static_cast<double>(std::max<std::size_t>(steps, 1)));
      nn::clip_global_norm(grad, cfg.gradient_clip_norm);
      adam.step(model.params, grad);
    }
    if (!nn::all_finite(model.params))
      throw NumericError("phones generator diverged at epoch " + std::to_string(epoch));
    const auto score = score_examples(model, examples);
    if (!std::isfinite(score.mean_nll))
      throw NumericError("phones generator diverged at epoch " + std::to_string(epoch));
    r.nll_trace.push_back(score.mean_nll);
    r.epochs_run = epoch + 1;
    r.final = score;
    if (cfg.stop_at_accuracy && score.accuracy >= *cfg.stop_at_accuracy) break;
  }
  if (cfg.epochs == 0) r.final = r.initial;
  return r;
}

// Analytic BPTT gradient of the summed NLL of a tiny corpus against central
// differences, per parameter block.
inline nn::GradCheckReport gradient_check(const PhonesModel& m, const Corpus& tiny,
                                          const LengthModel& lengths, double step = 1e-5) {
  const auto examples = make_examples(m, tiny, lengths, m.mask_emotion);
  std::function<double(const PhonesParams&, PhonesParams*)> loss =
      [&](const PhonesParams& q, PhonesParams* g) {
        double total = 0.0;
        for (const auto& ex : examples) total += sequence_loss(m, q, ex.ids, ex.cond, g).nll_sum;
        return total;
      };
  return nn::gradient_check(m.params, loss, step);
}

struct GenerationRequest {
  SpeakerId speaker;
  double ple_raw = 4.0, aro_raw = 4.0;
  int n_draws = 1;
  std::uint64_t seed = 0;
  double temperature = 1.0;
  bool mask_emotion = false;
};

// Ancestral sampling: at step n feed P_end(n), draw a phone from the softmax,
// then draw end-of-laughter with probability P_end(n).
inline std::vector<PhoneToken> sample_sequence(const PhonesModel& m, const SpeakerId& speaker,
                                               EmotionPoint emotion, const LengthModel& lengths,
                                               bool mask_emotion, double temperature, Rng& rng) {
  if (!(temperature > 0)) throw DomainError("temperature must be > 0");
  const auto cond = make_conditioning(speaker, emotion, lengths, mask_emotion || m.mask_emotion);
  const StoppingRule rule(cond.lambda);
  std::vector<PhoneToken> out;
  nn::LstmState state = nn::LstmState::zeros(m.dims.hidden);
  StepInput x{m.params.bos.col(0), 0.0, cond.speaker_code, cond.emotion};
  for (long long n = 1;; ++n) {
    x.p_end_feature = p_end(n, cond.lambda);
    auto step = forward_step(m, x, state, temperature);
    state = std::move(step.state);
    double u = rng.uniform(), acc = 0.0;
    Eigen::Index pick = step.probs.size() - 1;
    for (Eigen::Index k = 0; k < step.probs.size(); ++k) {
      acc += step.probs[k];
      if (u < acc) {
        pick = k;
        break;
      }
    }
    out.push_back(decode(m.inventory.token(static_cast<std::size_t>(pick))));
    if (draw_end(rule, n, rng)) break;
    x.phone_embedding = m.params.embedding.col(pick);
  }
  return out;
}

// n_draws sequences, each on its own stream split from the request seed.
inline std::vector<std::vector<PhoneToken>> generate(const PhonesModel& m,
                                                     const GenerationRequest& req,
                                                     const LengthModel& lengths) {
  if (req.n_draws < 1) throw DomainError("n_draws must be >= 1");
  const auto emotion = scale_emotion(req.ple_raw, req.aro_raw);
  Rng master(req.seed);
  std::vector<std::vector<PhoneToken>> out;
  for (int i = 0; i < req.n_draws; ++i) {
    Rng stream = master.split();
    out.push_back(sample_sequence(m, req.speaker, emotion, lengths, req.mask_emotion,
                                  req.temperature, stream));
  }
  return out;
}

inline std::vector<std::vector<PhoneToken>> generate(const PhonesModel& m,
                                                     const GenerationRequest& req) {
  return generate(m, req, m.length_model);
}

inline constexpr int kPhonesModelFormat = 1;

inline nlohmann::json to_json(PhonesModel m) {
  nlohmann::json j;
  j["format_version"] = kPhonesModelFormat;
  j["type"] = "phones_generator";
  j["version"] = m.version;
  j["inventory"] = {{"tokens", m.inventory.tokens()},
                    {"replacements", m.inventory.replacements()}};
  j["dims"] = {{"embed", m.dims.embed}, {"hidden", m.dims.hidden}, {"input", m.dims.input()}};
  j["mask_emotion"] = m.mask_emotion;
  j["length_model"] = to_json(m.length_model);
  j["weights"] = nn::blocks_to_json(m.params);
  return j;
}

inline PhonesModel phones_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kPhonesModelFormat ||
        j.at("type") != "phones_generator")
      throw ParseError("not a phones generator model file");
    PhoneInventory inv(j.at("inventory").at("tokens").get<std::vector<std::string>>(),
                       j.at("inventory").value("replacements", std::map<std::string, std::string>{}));
    PhonesDims dims{j.at("dims").at("embed").get<Eigen::Index>(),
                    j.at("dims").at("hidden").get<Eigen::Index>()};
    if (j.at("dims").at("input").get<Eigen::Index>() != dims.input())
      throw ParseError("input dimension must equal embed + 4");
    auto m = init_params(inv, 0, dims);
    nn::blocks_from_json(m.params, j.at("weights"));
    m.mask_emotion = j.at("mask_emotion").get<bool>();
    m.version = j.value("version", 1);
    m.length_model = length_model_from_json(j.at("length_model"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("phones model: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("phones model: ") + e.what());
  }
}

}  // namespace laughgen
