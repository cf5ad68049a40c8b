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

#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "laughgen/corpus/corpus.hpp"

namespace laughgen {

struct SpeakerStats {
  std::size_t episodes = 0;
  double mean_pleasantness = 0.0;
  double mean_arousal = 0.0;
  // Share of episodes with a voiced inhalation that is neither the first
  // nor the last event.
  double voiced_inhalation_episode_proportion = 0.0;
};

struct StatsReport {
  std::size_t episodes = 0;
  std::size_t bouts = 0;
  std::size_t calls = 0;
  std::size_t inhalations = 0;
  // Joint distribution over (vowel, voicing) of all calls; sums to 1.
  std::map<char, double> vowel_voiced;
  std::map<char, double> vowel_unvoiced;
  // Bout length (calls) -> share of bouts; sums to 1.
  std::map<std::size_t, double> bout_length;
  double single_call_bout_proportion = 0.0;
  std::optional<double> unvoiced_in_single_call;
  std::optional<double> unvoiced_in_multi_call;
  std::map<std::string, SpeakerStats> speakers;
};

inline StatsReport compute_stats(const Corpus& c) {
  if (c.episodes.empty()) throw DomainError("cannot compute statistics of empty corpus");
  StatsReport r;
  std::map<char, std::size_t> voiced, unvoiced;
  std::map<std::size_t, std::size_t> lengths;
  std::size_t single_n = 0, single_unv = 0, multi_n = 0, multi_unv = 0;
  struct Acc {
    std::size_t n = 0, voiced_mid = 0;
    double ple = 0.0, aro = 0.0;
  };
  std::map<std::string, Acc> acc;

  for (const auto& e : c.episodes) {
    ++r.episodes;
    auto& a = acc[e.speaker.name];
    ++a.n;
    a.ple += e.pleasantness;
    a.aro += e.arousal;
    bool voiced_mid = false;
    for (std::size_t i = 0; i < e.events.size(); ++i) {
      const auto& ev = e.events[i];
      if (const auto* b = std::get_if<Bout>(&ev)) {
        ++r.bouts;
        ++lengths[b->calls.size()];
        for (const auto& p : b->calls) {
          ++r.calls;
          (p.voiced ? voiced : unvoiced)[*p.vowel]++;
          const bool single = b->calls.size() == 1;
          (single ? single_n : multi_n)++;
          if (!p.voiced) (single ? single_unv : multi_unv)++;
        }
      } else {
        ++r.inhalations;
        const auto& p = std::get<PhoneToken>(ev);
        if (p.voiced && i > 0 && i + 1 < e.events.size()) voiced_mid = true;
      }
    }
    if (voiced_mid) ++a.voiced_mid;
  }

  if (r.calls > 0) {
    for (char v : kVowels) {
      r.vowel_voiced[v] = static_cast<double>(voiced[v]) / r.calls;
      r.vowel_unvoiced[v] = static_cast<double>(unvoiced[v]) / r.calls;
    }
  }
  if (r.bouts > 0) {
    for (const auto& [len, n] : lengths)
      r.bout_length[len] = static_cast<double>(n) / r.bouts;
    r.single_call_bout_proportion =
        static_cast<double>(lengths.count(1) ? lengths[1] : 0) / r.bouts;
  }
  if (single_n) r.unvoiced_in_single_call = static_cast<double>(single_unv) / single_n;
  if (multi_n) r.unvoiced_in_multi_call = static_cast<double>(multi_unv) / multi_n;
  for (const auto& [name, a] : acc) {
    r.speakers[name] = SpeakerStats{a.n, a.ple / a.n, a.aro / a.n,
                                    static_cast<double>(a.voiced_mid) / a.n};
  }
  return r;
}

inline nlohmann::json to_json(const StatsReport& r) {
  nlohmann::json j;
  j["episodes"] = r.episodes;
  j["bouts"] = r.bouts;
  j["calls"] = r.calls;
  j["inhalations"] = r.inhalations;
  for (const auto& [v, p] : r.vowel_voiced) {
    j["vowel_proportions"][std::string(1, v)] = {{"voiced", p},
                                                 {"unvoiced", r.vowel_unvoiced.at(v)}};
  }
  for (const auto& [len, p] : r.bout_length)
    j["bout_length_proportions"][std::to_string(len)] = p;
  j["single_call_bout_proportion"] = r.single_call_bout_proportion;
  j["unvoiced_in_single_call_bouts"] =
      r.unvoiced_in_single_call ? nlohmann::json(*r.unvoiced_in_single_call) : nlohmann::json();
  j["unvoiced_in_multi_call_bouts"] =
      r.unvoiced_in_multi_call ? nlohmann::json(*r.unvoiced_in_multi_call) : nlohmann::json();
  for (const auto& [name, s] : r.speakers) {
    j["speakers"][name] = {{"episodes", s.episodes},
                           {"mean_pleasantness", s.mean_pleasantness},
                           {"mean_arousal", s.mean_arousal},
                           {"voiced_inhalation_episode_proportion",
                            s.voiced_inhalation_episode_proportion}};
  }
  return j;
}

inline std::string to_text(const StatsReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "episodes " << r.episodes << ", bouts " << r.bouts << ", calls " << r.calls
     << ", inhalations " << r.inhalations << "\n";
  os << "vowel   voiced  unvoiced\n";
  for (const auto& [v, p] : r.vowel_voiced)
    os << "  " << v << "     " << p << "   " << r.vowel_unvoiced.at(v) << "\n";
  os << "calls per bout:\n";
  for (const auto& [len, p] : r.bout_length) os << "  " << len << ": " << p << "\n";
  os << "unvoiced in single-call bouts: ";
  if (r.unvoiced_in_single_call) os << *r.unvoiced_in_single_call; else os << "n/a";
  os << "\nunvoiced in multi-call bouts:  ";
  if (r.unvoiced_in_multi_call) os << *r.unvoiced_in_multi_call; else os << "n/a";
  os << "\n";
  for (const auto& [name, s] : r.speakers) {
    os << name << ": " << s.episodes << " episodes, mean pleasantness "
       << s.mean_pleasantness << ", mean arousal " << s.mean_arousal
       << ", voiced mid-laugh inhalation " << s.voiced_inhalation_episode_proportion
       << "\n";
  }
  return os.str();
}

}  // namespace laughgen
