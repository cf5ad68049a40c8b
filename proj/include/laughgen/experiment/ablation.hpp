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
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laughgen/acoustic/model.hpp"
#include "laughgen/acoustic/reference.hpp"
#include "laughgen/experiment/conditions.hpp"
#include "laughgen/experiment/ratings.hpp"
#include "laughgen/experiment/response.hpp"
#include "laughgen/experiment/stats.hpp"
#include "laughgen/phones/model.hpp"
#include "laughgen/vocoder/vocoder.hpp"

namespace laughgen {

// Deterministic stand-in for a listener. The reference-renderer rules are
// inverted to the acoustic cue, which is the perceived value; the phone cue
// inverts the corpus grammar and is reported alongside it. Cues are clamped
// to +-1.5.
//   acoustic aro  mean over calls of (d / 30 - 1) / 0.3
//   acoustic ple  mean over voiced call frames of
//                 (log f0 + 0.15 k/d - speaker base - 0.1 aro) / 0.2
//   phone ple     mean of (a share - 0.25) / 0.3 and
//                 (0.3 - unvoiced share) / 0.22 over the calls
//   phone aro     log(n / lambda(4,4)) / log(lambda(7,7) / lambda(4,4)) under
//                 the reference length model
struct PerceivedProxy {
  EmotionPoint perceived;
  EmotionPoint acoustic_cue;
  EmotionPoint phone_cue;
};

inline constexpr double kCueLimit = 1.5;

inline PerceivedProxy perceive(const std::vector<PhoneToken>& phones, const RenderedFeatures& r,
                               const SpeakerId& speaker) {
  if (phones.empty() || phones.size() != r.durations.size())
    throw DomainError("perceiver needs one duration per phone");
  auto clamp = [](double v) { return std::clamp(v, -kCueLimit, kCueLimit); };
  PerceivedProxy out;

  double dur = 0.0, f0 = 0.0;
  int calls = 0, voiced_frames = 0, a = 0, unvoiced = 0;
  for (std::size_t n = 0; n < phones.size(); ++n) {
    const auto& p = phones[n];
    if (!p.is_call()) continue;
    ++calls;
    dur += (r.durations[n] / 30.0 - 1.0) / 0.3;
    if (*p.vowel == 'a') ++a;
    if (!p.voiced) ++unvoiced;
  }
  out.acoustic_cue.arousal = calls ? clamp(dur / calls) : 0.0;
  const double base = speaker_base_log_f0(speaker) + 0.1 * out.acoustic_cue.arousal;
  Eigen::Index col = 0;
  for (std::size_t n = 0; n < phones.size(); ++n) {
    const int d = r.durations[n];
    if (phones[n].is_call())
      for (int k = 0; k < d; ++k) {
        const auto t = col + k;
        if (t >= r.track.size() || r.track.voicedness(t) < 0.5) continue;
        f0 += (r.track.log_f0(t) + 0.15 * frame_position(k, d) - base) / 0.2;
        ++voiced_frames;
      }
    col += d;
  }
  out.acoustic_cue.pleasantness = voiced_frames ? clamp(f0 / voiced_frames) : 0.0;

  if (calls) {
    const double share_a = static_cast<double>(a) / calls;
    const double share_u = static_cast<double>(unvoiced) / calls;
    out.phone_cue.pleasantness = clamp(0.5 * ((share_a - 0.25) / 0.3 + (0.3 - share_u) / 0.22));
  }
  const auto truth = reference_length_model();
  const double l4 = predict_lambda(truth, speaker, scale_emotion(4, 4));
  const double l7 = predict_lambda(truth, speaker, scale_emotion(7, 7));
  out.phone_cue.arousal =
      clamp(std::log(static_cast<double>(phones.size()) / l4) / std::log(l7 / l4));

  out.perceived = out.acoustic_cue;
  return out;
}

// Slot 0 holds the emotion-masked model, slot 1 the conditioned one.
struct AblationModels {
  std::array<std::optional<PhonesModel>, 2> phones;
  std::array<std::optional<AcousticModel>, 2> acoustic;
};

inline void check_models(const AblationModels& m) {
  for (int d = 0; d < 2; ++d) {
    const char* which = d ? "conditioned" : "masked";
    if (!m.phones[d]) throw DomainError(std::string("missing ") + which + " phones model");
    if (!m.acoustic[d]) throw DomainError(std::string("missing ") + which + " acoustic model");
    if (m.phones[d]->mask_emotion == static_cast<bool>(d))
      throw DomainError(std::string(which) + " phones model has the wrong masking flag");
    if (m.acoustic[d]->mask_emotion == static_cast<bool>(d))
      throw DomainError(std::string(which) + " acoustic model has the wrong masking flag");
  }
}

struct AblationTrainingConfig {
  SpeakerId speaker = default_speakers()[0];
  PhonesDims phones_dims;
  TrainingConfig phones;
  Eigen::Index acoustic_hidden = 128;
  int acoustic_layers = 3;
  AcousticTrainingConfig acoustic;
  std::uint64_t seed = 1;
};

// Both phones generators use the phones corpus inventory; the masked one gets
// a baselines-only length model, the conditioned one the AIC-selected model.
// The acoustic models train on the acoustic corpus episodes of cfg.speaker.
inline AblationModels train_ablation_models(const Corpus& corpus, const Corpus& acoustic_corpus,
                                            const AblationTrainingConfig& cfg) {
  AblationModels m;
  Rng rng(cfg.seed);
  const LengthModel lengths[2] = {baseline_length_model(corpus), select_length_model(corpus)};
  for (int d = 0; d < 2; ++d) {
    auto pc = cfg.phones;
    pc.mask_emotion = d == 0;
    pc.seed = rng();
    m.phones[d] = train(init_params(corpus.inventory, rng(), cfg.phones_dims), corpus, lengths[d], pc)
                      .model;
    auto ac = cfg.acoustic;
    ac.mask_emotion = d == 0;
    ac.duration.seed = rng();
    ac.acoustic.seed = rng();
    m.acoustic[d] = train_acoustic(init_acoustic_model(cfg.speaker, rng(), cfg.acoustic_hidden,
                                                       cfg.acoustic_layers),
                                   acoustic_corpus, ac)
                        .model;
  }
  return m;
}

inline AblationModels train_ablation_models(const Corpus& corpus,
                                            const AblationTrainingConfig& cfg) {
  return train_ablation_models(corpus, corpus, cfg);
}

struct GridConfig {
  std::uint64_t seed = 1;
  SpeakerId speaker = default_speakers()[0];
  int sequences_per_cell = kSequencesPerCell;
  int flagged_per_cell = kFlaggedPerCell;
  double temperature = 1.0;
  std::optional<std::string> wav_dir;
  VocoderConfig vocoder;
};

struct StimulusEntry {
  std::string id;
  std::pair<int, int> target_raw;
  AblationCondition condition;
  int sequence_index = 0;
  bool flagged = false;
  std::vector<PhoneToken> phones;
  std::vector<int> durations;
  PerceivedProxy proxy;
  std::string wav_path;
};

struct StimulusSet {
  std::uint64_t seed = 0;
  SpeakerId speaker;
  std::vector<StimulusEntry> entries;

  std::set<std::string> ids() const {
    std::set<std::string> s;
    for (const auto& e : entries) s.insert(e.id);
    return s;
  }
};

inline std::string stimulus_id(const std::pair<int, int>& target, const AblationCondition& c,
                               int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "ple%daro%d_%s_%02d", target.first, target.second,
                condition_label(c).c_str(), index);
  return buf;
}

// Sampling stream of one (condition, sequence index) cell. The target does
// not enter, so a fully masked cell repeats the same sequences at every
// target.
inline std::uint64_t cell_seed(std::uint64_t seed, const AblationCondition& c, int index) {
  Rng r(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(1 + c.index() * 4096 + index)));
  return r();
}

inline StimulusSet run_ablation_grid(const AblationModels& models, const GridConfig& cfg) {
  check_models(models);
  if (cfg.sequences_per_cell < 1 || cfg.flagged_per_cell < 0 ||
      cfg.flagged_per_cell > cfg.sequences_per_cell)
    throw DomainError("invalid grid cell sizes");
  if (cfg.wav_dir) std::filesystem::create_directories(*cfg.wav_dir);
  StimulusSet set{cfg.seed, cfg.speaker, {}};
  for (const auto& target : kTargetGrid) {
    const auto emotion = scale_emotion(target.first, target.second);
    for (const auto& c : kConditions) {
      const auto& pm = *models.phones[c.delta_phones];
      const auto& am = *models.acoustic[c.delta_acoust];
      for (int i = 0; i < cfg.sequences_per_cell; ++i) {
        StimulusEntry e;
        e.id = stimulus_id(target, c, i);
        e.target_raw = target;
        e.condition = c;
        e.sequence_index = i;
        e.flagged = i < cfg.flagged_per_cell;
        Rng rng(cell_seed(cfg.seed, c, i));
        e.phones = sample_sequence(pm, cfg.speaker, emotion, pm.length_model, false,
                                   cfg.temperature, rng);
        const auto rendered = render_features(am, e.phones, emotion);
        e.durations = rendered.durations;
        e.proxy = perceive(e.phones, rendered, cfg.speaker);
        if (cfg.wav_dir) {
          e.wav_path = (std::filesystem::path(*cfg.wav_dir) / (e.id + ".wav")).string();
          write_wav(synthesize(rendered.track, cfg.vocoder, rng()), e.wav_path);
        }
        set.entries.push_back(std::move(e));
      }
    }
  }
  return set;
}

inline std::map<std::string, EmotionPoint> proxy_perception(const StimulusSet& s) {
  std::map<std::string, EmotionPoint> out;
  for (const auto& e : s.entries)
    if (e.flagged) out.emplace(e.id, e.proxy.perceived);
  return out;
}

// Raw 1..7 mean ratings to scaled units.
inline std::map<std::string, EmotionPoint> rating_perception(
    const std::map<std::string, MeanRating>& means) {
  std::map<std::string, EmotionPoint> out;
  for (const auto& [id, m] : means) out.emplace(id, scale_emotion(m.ple, m.aro));
  return out;
}

// A constant series, as perceived from fully masked models, correlates at 0.
inline double response_r(const std::vector<double>& x, const std::vector<double>& y) {
  auto constant = [](const std::vector<double>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (x.size() == y.size() && (constant(x) || constant(y))) return 0.0;
  return pearson_r(x, y);
}

struct ConditionCorrelation {
  AblationCondition condition;
  double r_ple = 0.0, r_aro = 0.0;
  std::size_t n = 0;
};

struct WilliamsComparison {
  AblationCondition first, second;
  double r12_ple = 0, r13_ple = 0, r23_ple = 0;
  double r12_aro = 0, r13_aro = 0, r23_aro = 0;
  WilliamsResult ple, aro;
  std::size_t n = 0;
};

struct AblationReport {
  std::vector<ConditionCorrelation> correlations;
  std::vector<WilliamsComparison> comparisons;
  ResponseModel response_ple, response_aro;

  const ConditionCorrelation& correlation(const AblationCondition& c) const {
    for (const auto& r : correlations)
      if (r.condition == c) return r;
    throw DomainError("no correlation for " + condition_label(c));
  }
};

namespace detail {

struct CellSample {
  std::vector<double> x_ple, x_aro, y_ple, y_aro;
};

inline CellSample condition_sample(const StimulusSet& s,
                                   const std::map<std::string, EmotionPoint>& perceived,
                                   const AblationCondition& c) {
  CellSample out;
  for (const auto& e : s.entries) {
    if (!e.flagged || !(e.condition == c)) continue;
    auto it = perceived.find(e.id);
    if (it == perceived.end()) continue;
    out.x_ple.push_back(scaled_target(e.target_raw, ResponseDimension::kPleasantness));
    out.x_aro.push_back(scaled_target(e.target_raw, ResponseDimension::kArousal));
    out.y_ple.push_back(it->second.pleasantness);
    out.y_aro.push_back(it->second.arousal);
  }
  return out;
}

}  // namespace detail

// Pairs stimuli of a and b that share target and sequence index.
inline WilliamsComparison compare_conditions(const StimulusSet& s,
                                             const std::map<std::string, EmotionPoint>& perceived,
                                             const AblationCondition& a,
                                             const AblationCondition& b) {
  std::vector<double> xp, xa, ap, aa, bp, ba;
  for (const auto& e : s.entries) {
    if (!e.flagged || !(e.condition == a)) continue;
    const auto ia = perceived.find(e.id);
    const auto ib = perceived.find(stimulus_id(e.target_raw, b, e.sequence_index));
    if (ia == perceived.end() || ib == perceived.end()) continue;
    xp.push_back(scaled_target(e.target_raw, ResponseDimension::kPleasantness));
    xa.push_back(scaled_target(e.target_raw, ResponseDimension::kArousal));
    ap.push_back(ia->second.pleasantness);
    aa.push_back(ia->second.arousal);
    bp.push_back(ib->second.pleasantness);
    ba.push_back(ib->second.arousal);
  }
  WilliamsComparison w{a, b};
  w.n = xp.size();
  w.r12_ple = response_r(xp, ap);
  w.r13_ple = response_r(xp, bp);
  w.r23_ple = response_r(ap, bp);
  w.r12_aro = response_r(xa, aa);
  w.r13_aro = response_r(xa, ba);
  w.r23_aro = response_r(aa, ba);
  w.ple = williams_t(w.r12_ple, w.r13_ple, w.r23_ple, static_cast<int>(w.n));
  w.aro = williams_t(w.r12_aro, w.r13_aro, w.r23_aro, static_cast<int>(w.n));
  return w;
}

// Per-condition target/perceived correlations over the flagged stimuli,
// +phones+acoust against -phones-acoust and +phones-acoust, and the
// stepwise response models. perceived is in scaled units.
inline AblationReport analyze_ablation(const StimulusSet& s,
                                       const std::map<std::string, EmotionPoint>& perceived) {
  AblationReport rep;
  std::vector<ResponseObservation> obs_ple, obs_aro;
  for (const auto& c : kConditions) {
    const auto cell = detail::condition_sample(s, perceived, c);
    if (cell.x_ple.size() < 3)
      throw DomainError("too few rated stimuli for " + condition_label(c));
    rep.correlations.push_back(
        {c, response_r(cell.x_ple, cell.y_ple), response_r(cell.x_aro, cell.y_aro), cell.x_ple.size()});
    for (std::size_t i = 0; i < cell.x_ple.size(); ++i) {
      obs_ple.push_back({c, cell.x_ple[i], cell.y_ple[i]});
      obs_aro.push_back({c, cell.x_aro[i], cell.y_aro[i]});
    }
  }
  const AblationCondition both{1, 1};
  rep.comparisons.push_back(compare_conditions(s, perceived, both, {0, 0}));
  rep.comparisons.push_back(compare_conditions(s, perceived, both, {1, 0}));
  rep.response_ple = fit_response_model(obs_ple, ResponseDimension::kPleasantness);
  rep.response_aro = fit_response_model(obs_aro, ResponseDimension::kArousal);
  return rep;
}

inline nlohmann::json to_json(const AblationReport& r) {
  nlohmann::json corr = nlohmann::json::array();
  for (const auto& c : r.correlations)
    corr.push_back({{"condition", condition_label(c.condition)},
                    {"r_ple", c.r_ple},
                    {"r_aro", c.r_aro},
                    {"n", c.n}});
  nlohmann::json cmp = nlohmann::json::array();
  for (const auto& w : r.comparisons)
    cmp.push_back({{"first", condition_label(w.first)},
                   {"second", condition_label(w.second)},
                   {"n", w.n},
                   {"ple", {{"r12", w.r12_ple}, {"r13", w.r13_ple}, {"r23", w.r23_ple},
                            {"t", w.ple.statistic}, {"p", w.ple.p_two_sided}, {"df", w.ple.df}}},
                   {"aro", {{"r12", w.r12_aro}, {"r13", w.r13_aro}, {"r23", w.r23_aro},
                            {"t", w.aro.statistic}, {"p", w.aro.p_two_sided}, {"df", w.aro.df}}}});
  return {{"correlations", corr},
          {"williams", cmp},
          {"response_models", {to_json(r.response_ple), to_json(r.response_aro)}}};
}

inline nlohmann::json to_json(const StimulusSet& s) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : s.entries)
    entries.push_back({{"id", e.id},
                       {"target", {e.target_raw.first, e.target_raw.second}},
                       {"condition", condition_label(e.condition)},
                       {"sequence_index", e.sequence_index},
                       {"flagged", e.flagged},
                       {"phones", join_phones(e.phones)},
                       {"durations", e.durations},
                       {"proxy", {e.proxy.perceived.pleasantness, e.proxy.perceived.arousal}},
                       {"wav", e.wav_path}});
  return {{"format_version", 1},
          {"type", "stimulus_set"},
          {"seed", s.seed},
          {"speaker", {{"name", s.speaker.name}, {"code", s.speaker.code}}},
          {"entries", entries}};
}

inline StimulusSet stimulus_set_from_json(const nlohmann::json& j) {
  try {
    if (j.at("type").get<std::string>() != "stimulus_set")
      throw ParseError("not a stimulus set");
    StimulusSet s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.speaker = {j.at("speaker").at("name").get<std::string>(),
                 j.at("speaker").at("code").get<double>()};
    for (const auto& je : j.at("entries")) {
      StimulusEntry e;
      e.id = je.at("id").get<std::string>();
      const auto t = je.at("target").get<std::vector<int>>();
      if (t.size() != 2) throw ParseError("target must have two entries");
      e.target_raw = {t[0], t[1]};
      e.condition = parse_condition(je.at("condition").get<std::string>());
      e.sequence_index = je.at("sequence_index").get<int>();
      e.flagged = je.at("flagged").get<bool>();
      e.phones = split_phones(je.at("phones").get<std::string>());
      e.durations = je.at("durations").get<std::vector<int>>();
      const auto p = je.at("proxy").get<std::vector<double>>();
      if (p.size() != 2) throw ParseError("proxy must have two entries");
      e.proxy.perceived = {p[0], p[1]};
      e.wav_path = je.at("wav").get<std::string>();
      s.entries.push_back(std::move(e));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("stimulus set: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("stimulus set: ") + e.what());
  }
}

}  // namespace laughgen
