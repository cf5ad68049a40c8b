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
#include <cstdint>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "laughgen/core/rng.hpp"
#include "laughgen/corpus/corpus.hpp"
#include "laughgen/corpus/inventory.hpp"
#include "laughgen/length_model/length_model.hpp"
#include "laughgen/stopping/poisson.hpp"

namespace laughgen {

// Rule grammar for synthetic laughs. Probabilities are affine in the scaled
// emotion (ple, aro) and clamped to [0.02, 0.98]:
//   P(inhalation at a position)       = inhale_base + inhale_aro * aro
//   P(voiced | inhalation)            = voiced_inh_base + voiced_inh_emo * (ple + aro) / 2
//   P(prolonged | voiced inhalation)  = prolonged_inh
//   P(repeat previous call in a bout) = repeat
//   P(vowel a | new call)             = a_base + a_ple * ple + a_aro * aro;
//     the rest split u 0.5, o 0.2, e 0.15, i 0.15
//   P(unvoiced | new call)            = unvoiced_base + unvoiced_ple * ple
//   consonant "h" with p_consonant, nasal (voiced only) p_nasal, prolonged p_prolong
// Generated phones are snapped onto the target inventory with nearest_phone.
struct PhoneGrammar {
  double inhale_base = 0.15, inhale_aro = 0.08;
  double voiced_inh_base = 0.45, voiced_inh_emo = 0.35;
  double prolonged_inh = 0.1;
  double repeat = 0.75;
  double a_base = 0.25, a_ple = 0.3, a_aro = 0.1;
  double unvoiced_base = 0.3, unvoiced_ple = -0.22;
  double p_consonant = 0.85, p_nasal = 0.06, p_prolong = 0.05;
};

// Raw ratings ~ N(mean, sd), clamped to [1, 7] and rounded to half steps
// (two averaged integer ratings). fixed_* pins a dimension instead.
struct EmotionSampler {
  double ple_mean = 5.9, ple_sd = 1.0;
  double aro_mean = 5.5, aro_sd = 1.0;
  std::optional<double> fixed_ple, fixed_aro;
};

struct SynthSpec {
  std::size_t n_episodes = 0;
  LengthModel truth = reference_length_model();
  PhoneGrammar grammar;
  EmotionSampler emotion;
  std::vector<SpeakerId> speakers = default_speakers();
  PhoneInventory inventory = default_inventory();
  std::uint64_t seed = 0;
};

namespace detail {

inline double clamp_prob(double p) { return std::clamp(p, 0.02, 0.98); }

inline double sample_rating(Rng& rng, double mean, double sd, std::optional<double> fixed) {
  if (fixed) return *fixed;
  const double r = std::clamp(rng.normal(mean, sd), kRatingMin, kRatingMax);
  return std::round(r * 2.0) / 2.0;
}

inline char sample_vowel(Rng& rng, const PhoneGrammar& g, const EmotionPoint& e) {
  const double pa = clamp_prob(g.a_base + g.a_ple * e.pleasantness + g.a_aro * e.arousal);
  double u = rng.uniform();
  if (u < pa) return 'a';
  u = (u - pa) / (1.0 - pa);
  if (u < 0.5) return 'u';
  if (u < 0.7) return 'o';
  if (u < 0.85) return 'e';
  return 'i';
}

}  // namespace detail

// Draws n phones from the grammar for one episode.
inline std::vector<PhoneToken> sample_grammar_phones(Rng& rng, const PhoneGrammar& g,
                                                     const EmotionPoint& e, std::size_t n,
                                                     const PhoneInventory& inventory) {
  const std::set<std::string> targets(inventory.tokens().begin(), inventory.tokens().end());
  std::vector<PhoneToken> phones;
  const double p_inh = detail::clamp_prob(g.inhale_base + g.inhale_aro * e.arousal);
  const double p_voiced_inh = detail::clamp_prob(
      g.voiced_inh_base + g.voiced_inh_emo * 0.5 * (e.pleasantness + e.arousal));
  const double p_unvoiced =
      detail::clamp_prob(g.unvoiced_base + g.unvoiced_ple * e.pleasantness);
  while (phones.size() < n) {
    PhoneToken p;
    if (rng.bernoulli(p_inh)) {
      const bool voiced = rng.bernoulli(p_voiced_inh);
      p = make_inhalation(voiced, voiced && rng.bernoulli(g.prolonged_inh));
    } else if (!phones.empty() && phones.back().is_call() && rng.bernoulli(g.repeat)) {
      p = phones.back();
    } else {
      const char v = detail::sample_vowel(rng, g, e);
      const bool voiced = !rng.bernoulli(p_unvoiced);
      const bool consonant = rng.bernoulli(g.p_consonant);
      p = make_call(consonant ? std::optional<std::string>("h") : std::nullopt, v, voiced,
                    voiced && rng.bernoulli(g.p_nasal),
                    consonant && rng.bernoulli(g.p_prolong));
    }
    phones.push_back(nearest_phone(p, targets));
  }
  return phones;
}

// Lengths ~ zero-truncated Poisson with the truth model's lambda, phones from
// the grammar. Episode ids are "syn0000", "syn0001", ...
inline Corpus generate_synthetic_corpus(const SynthSpec& spec) {
  if (spec.n_episodes < 1) throw DomainError("synthetic corpus needs n_episodes >= 1");
  if (spec.speakers.empty()) throw DomainError("synthetic corpus needs a speaker");
  for (const auto& [t, v] : spec.truth.coefficients)
    if (!std::isfinite(v)) throw DomainError("non-finite truth coefficient '" + t + "'");
  for (const auto& s : spec.speakers)
    if (!spec.truth.speaker_baselines.count(s.name))
      throw DomainError("truth model lacks a baseline for '" + s.name + "'");

  Rng rng(spec.seed);
  Corpus c;
  c.speakers = spec.speakers;
  c.inventory = spec.inventory;
  for (std::size_t i = 0; i < spec.n_episodes; ++i) {
    LaughterEpisode e;
    std::ostringstream id;
    id << "syn" << std::setw(4) << std::setfill('0') << i;
    e.id = id.str();
    e.speaker = spec.speakers[rng.below(spec.speakers.size())];
    e.pleasantness = detail::sample_rating(rng, spec.emotion.ple_mean, spec.emotion.ple_sd,
                                           spec.emotion.fixed_ple);
    e.arousal = detail::sample_rating(rng, spec.emotion.aro_mean, spec.emotion.aro_sd,
                                      spec.emotion.fixed_aro);
    const auto emo = emotion_of(e);
    const double lambda = predict_lambda(spec.truth, e.speaker, emo);
    std::uint64_t len = 0;
    while (len == 0) len = rng.poisson(lambda);
    e.events = group_events(sample_grammar_phones(rng, spec.grammar, emo, len, spec.inventory));
    c.episodes.push_back(std::move(e));
  }
  return c;
}

}  // namespace laughgen
