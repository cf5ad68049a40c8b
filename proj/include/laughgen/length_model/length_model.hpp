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
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laughgen/corpus/corpus.hpp"
#include "laughgen/length_model/regression.hpp"

namespace laughgen {

// Poisson GLM of laugh length: log(lambda) = b_speaker + sum coeff * term.
struct LengthModel {
  std::map<std::string, double> coefficients;       // non-baseline terms
  std::map<std::string, double> speaker_baselines;  // b per speaker name
  std::vector<std::string> selected_terms;          // design order, baselines first
  std::vector<SpeakerId> speakers;
  double log_likelihood = 0.0;
  double aic = 0.0;

  int parameter_count() const {
    return static_cast<int>(coefficients.size() + speaker_baselines.size());
  }

  bool has_emotion_terms() const { return !coefficients.empty(); }
};

// Length candidates apart from the speaker baselines.
inline std::vector<std::string> length_term_pool() {
  return {std::string(kPleasantness), std::string(kArousal), std::string(kPleAro)};
}

inline double term_value(const std::string& term, const EmotionPoint& e) {
  double v = 1.0;
  for (const auto& f : split_term(term)) {
    if (f == kPleasantness) v *= e.pleasantness;
    else if (f == kArousal) v *= e.arousal;
    else throw DomainError("unknown term '" + term + "'");
  }
  return v;
}

inline double predict_log_lambda(const LengthModel& m, const std::string& speaker,
                                 const EmotionPoint& e) {
  auto it = m.speaker_baselines.find(speaker);
  if (it == m.speaker_baselines.end())
    throw DomainError("length model has no baseline for speaker '" + speaker + "'");
  double eta = it->second;
  for (const auto& [term, coeff] : m.coefficients) eta += coeff * term_value(term, e);
  return eta;
}

inline double predict_lambda(const LengthModel& m, const SpeakerId& s,
                             const EmotionPoint& e) {
  return std::exp(predict_log_lambda(m, s.name, e));
}

// Fitted coefficients reported for the two-speaker laughter dataset.
inline LengthModel reference_length_model() {
  LengthModel m;
  m.speakers = default_speakers();
  m.speaker_baselines = {{"04_MSY", 1.433}, {"06_FWA", 0.936}};
  m.coefficients = {{std::string(kPleasantness), 0.527}, {std::string(kPleAro), 0.750}};
  m.selected_terms = {"baseline:04_MSY", "baseline:06_FWA", std::string(kPleasantness),
                      std::string(kPleAro)};
  return m;
}

inline LengthModel to_length_model(const DesignMatrix& X, const PoissonFit& fit,
                                   std::vector<SpeakerId> speakers) {
  LengthModel m;
  m.speakers = std::move(speakers);
  m.selected_terms = X.column_labels;
  for (std::size_t j = 0; j < X.column_labels.size(); ++j) {
    const auto& label = X.column_labels[j];
    const double b = fit.beta[static_cast<Eigen::Index>(j)];
    if (label.rfind(kBaselinePrefix, 0) == 0)
      m.speaker_baselines[label.substr(kBaselinePrefix.size())] = b;
    else
      m.coefficients[label] = b;
  }
  m.log_likelihood = fit.log_likelihood;
  m.aic = aic_of(fit.log_likelihood, m.parameter_count());
  return m;
}

enum class Family { kPoisson, kGaussian };

struct Selection {
  std::vector<std::string> terms;  // baselines first, then pool order
  double aic = 0.0;
  std::size_t models_compared = 0;
};

// Bidirectional stepwise AIC search. Starts from the baselines, adds or drops
// one pool term per step, never drops a baseline. Candidates are scanned
// drops-then-adds in term order and only a strictly lower AIC is accepted,
// so ties go to the earliest candidate.
inline Selection stepwise_select(const DesignMatrix& X_full, const Eigen::VectorXd& y,
                                 Family family,
                                 const std::vector<std::string>& baselines) {
  std::vector<std::string> pool;
  for (const auto& l : X_full.column_labels)
    if (std::find(baselines.begin(), baselines.end(), l) == baselines.end())
      pool.push_back(l);

  std::map<std::set<std::string>, double> cache;
  auto ordered = [&](const std::set<std::string>& chosen) {
    std::vector<std::string> labels = baselines;
    for (const auto& l : pool)
      if (chosen.count(l)) labels.push_back(l);
    return labels;
  };
  auto score = [&](const std::set<std::string>& chosen) {
    if (auto it = cache.find(chosen); it != cache.end()) return it->second;
    const auto sub = X_full.select(ordered(chosen));
    double aic;
    if (family == Family::kPoisson) {
      const auto fit = fit_poisson_irls(sub, y);
      aic = aic_of(fit.log_likelihood, static_cast<int>(sub.p()));
    } else {
      aic = fit_ols(sub, y).aic;
    }
    cache.emplace(chosen, aic);
    return aic;
  };

  std::set<std::string> current;
  double best = score(current);
  while (true) {
    std::set<std::string> next;
    double next_aic = best;
    bool improved = false;
    auto consider = [&](const std::set<std::string>& cand) {
      const double a = score(cand);
      if (a < next_aic) {
        next_aic = a;
        next = cand;
        improved = true;
      }
    };
    for (const auto& l : pool)
      if (current.count(l)) {
        auto cand = current;
        cand.erase(l);
        consider(cand);
      }
    for (const auto& l : pool)
      if (!current.count(l)) {
        auto cand = current;
        cand.insert(l);
        consider(cand);
      }
    if (!improved) break;
    current = std::move(next);
    best = next_aic;
  }
  return Selection{ordered(current), best, cache.size()};
}

inline std::vector<std::pair<SpeakerId, EmotionPoint>> length_inputs(const Corpus& c) {
  std::vector<std::pair<SpeakerId, EmotionPoint>> out;
  out.reserve(c.episodes.size());
  for (const auto& e : c.episodes) out.emplace_back(e.speaker, emotion_of(e));
  return out;
}

inline Eigen::VectorXd length_targets(const Corpus& c) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(c.episodes.size()));
  for (std::size_t i = 0; i < c.episodes.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = static_cast<double>(flatten_episode(c.episodes[i]).size());
  return y;
}

// Speakers that actually occur in the corpus, in registry order.
inline std::vector<SpeakerId> observed_speakers(const Corpus& c) {
  std::vector<SpeakerId> out;
  for (const auto& s : c.speakers)
    if (std::any_of(c.episodes.begin(), c.episodes.end(),
                    [&](const LaughterEpisode& e) { return e.speaker.name == s.name; }))
      out.push_back(s);
  return out;
}

inline std::vector<std::string> baseline_terms(const std::vector<SpeakerId>& speakers) {
  std::vector<std::string> out;
  for (const auto& s : speakers) out.push_back(baseline_term(s.name));
  return out;
}

inline LengthModel fit_length_model(const Corpus& c, const std::vector<std::string>& pool_terms) {
  if (c.episodes.empty()) throw DomainError("cannot fit length model on empty corpus");
  const auto speakers = observed_speakers(c);
  auto terms = baseline_terms(speakers);
  terms.insert(terms.end(), pool_terms.begin(), pool_terms.end());
  const auto X = build_design(length_inputs(c), terms);
  return to_length_model(X, fit_poisson_irls(X, length_targets(c)), speakers);
}

// Stepwise-AIC selection over the default pool, then a final refit.
inline LengthModel select_length_model(const Corpus& c) {
  if (c.episodes.empty()) throw DomainError("cannot fit length model on empty corpus");
  const auto speakers = observed_speakers(c);
  const auto baselines = baseline_terms(speakers);
  auto terms = baselines;
  for (const auto& t : length_term_pool()) terms.push_back(t);
  const auto X = build_design(length_inputs(c), terms);
  const auto y = length_targets(c);
  const auto sel = stepwise_select(X, y, Family::kPoisson, baselines);
  const auto Xs = X.select(sel.terms);
  return to_length_model(Xs, fit_poisson_irls(Xs, y), speakers);
}

// Baselines only; the length model paired with emotion-masked generation.
inline LengthModel baseline_length_model(const Corpus& c) { return fit_length_model(c, {}); }

inline nlohmann::json to_json(const LengthModel& m) {
  nlohmann::json j{{"type", "poisson_glm"},
                   {"terms", m.selected_terms},
                   {"coefficients", m.coefficients},
                   {"baselines", m.speaker_baselines},
                   {"log_likelihood", m.log_likelihood},
                   {"aic", m.aic}};
  j["speakers"] = nlohmann::json::array();
  for (const auto& s : m.speakers) j["speakers"].push_back({{"name", s.name}, {"code", s.code}});
  return j;
}

inline LengthModel length_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("type") != "poisson_glm") throw ParseError("not a poisson_glm model");
    LengthModel m;
    m.selected_terms = j.at("terms").get<std::vector<std::string>>();
    m.coefficients = j.at("coefficients").get<std::map<std::string, double>>();
    m.speaker_baselines = j.at("baselines").get<std::map<std::string, double>>();
    m.log_likelihood = j.value("log_likelihood", 0.0);
    m.aic = j.at("aic").get<double>();
    if (j.contains("speakers"))
      for (const auto& s : j.at("speakers"))
        m.speakers.push_back({s.at("name").get<std::string>(), s.at("code").get<double>()});
    for (const auto& [t, v] : m.coefficients) term_value(t, EmotionPoint{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("length model: ") + e.what());
  }
}

}  // namespace laughgen
