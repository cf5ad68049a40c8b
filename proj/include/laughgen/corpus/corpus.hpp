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
#include <map>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "laughgen/corpus/phone.hpp"

namespace laughgen {

struct SpeakerId {
  std::string name;
  double code = 0.0;  // numeric value fed to the models as the speaker input

  bool operator==(const SpeakerId&) const = default;
};

inline std::vector<SpeakerId> default_speakers() {
  return {{"04_MSY", 0.0}, {"06_FWA", 1.0}};
}

// One exhalation: a non-empty run of calls.
struct Bout {
  std::vector<PhoneToken> calls;
  bool operator==(const Bout&) const = default;
};

// Either a bout or a single inhalation token.
using LaughterEvent = std::variant<Bout, PhoneToken>;

struct LaughterEpisode {
  std::string id;
  SpeakerId speaker;
  std::vector<LaughterEvent> events;
  double pleasantness = 4.0;  // averaged rating, [1, 7]
  double arousal = 4.0;

  bool operator==(const LaughterEpisode&) const = default;
};

// Emotion dimensions mapped from the [1, 7] rating scale onto [-1, 1].
struct EmotionPoint {
  double pleasantness = 0.0;
  double arousal = 0.0;
  bool operator==(const EmotionPoint&) const = default;
};

inline constexpr double kRatingMin = 1.0;
inline constexpr double kRatingMax = 7.0;

inline bool is_valid_rating(double r) {
  return std::isfinite(r) && r >= kRatingMin && r <= kRatingMax;
}

inline EmotionPoint scale_emotion(double ple_raw, double aro_raw) {
  if (!is_valid_rating(ple_raw) || !is_valid_rating(aro_raw))
    throw DomainError("emotion rating outside [1, 7]: (" +
                      std::to_string(ple_raw) + ", " + std::to_string(aro_raw) +
                      ")");
  return {(ple_raw - 4.0) / 3.0, (aro_raw - 4.0) / 3.0};
}

inline double unscale_rating(double scaled) { return 4.0 + 3.0 * scaled; }

inline EmotionPoint emotion_of(const LaughterEpisode& e) {
  return scale_emotion(e.pleasantness, e.arousal);
}

// Ordered token list plus the rare-token replacement table.
class PhoneInventory {
 public:
  PhoneInventory() = default;
  explicit PhoneInventory(std::vector<std::string> tokens,
                          std::map<std::string, std::string> replacements = {})
      : tokens_(std::move(tokens)), replacements_(std::move(replacements)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], i).second)
        throw DomainError("duplicate inventory token '" + tokens_[i] + "'");
      decode(tokens_[i]);
    }
    for (const auto& [from, to] : replacements_)
      if (!index_.count(to))
        throw DomainError("replacement target '" + to + "' for '" + from +
                          "' is not in the inventory");
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::map<std::string, std::string>& replacements() const {
    return replacements_;
  }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }

  // Applies the replacement map.
  std::string canonical(const std::string& tok) const {
    auto it = replacements_.find(tok);
    return it == replacements_.end() ? tok : it->second;
  }

  bool contains(const std::string& tok) const {
    return index_.count(canonical(tok)) > 0;
  }

  std::size_t index_of(const std::string& tok) const {
    auto it = index_.find(canonical(tok));
    if (it == index_.end())
      throw DomainError("phone '" + tok + "' is not in the inventory");
    return it->second;
  }
  std::size_t index_of(const PhoneToken& p) const { return index_of(encode(p)); }

  bool operator==(const PhoneInventory& o) const {
    return tokens_ == o.tokens_ && replacements_ == o.replacements_;
  }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::string> replacements_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Fixture inventory of 22 calls and inhalations.
inline PhoneInventory default_inventory() {
  return PhoneInventory({"ha", "he", "hi", "hu", "ho", "%ha", "%he", "%hi",
                         "%hu", "%ho", "~ha", "~hu", "~ho", "h:a", "h:u", "a",
                         "u", "o", "%u", "H:", "h", "H"});
}

struct Corpus {
  std::vector<SpeakerId> speakers = default_speakers();
  std::vector<LaughterEpisode> episodes;
  PhoneInventory inventory;

  bool operator==(const Corpus&) const = default;

  const SpeakerId& speaker(const std::string& name) const {
    for (const auto& s : speakers)
      if (s.name == name) return s;
    throw DomainError("unknown speaker '" + name + "'");
  }
};

inline std::vector<PhoneToken> flatten_episode(const LaughterEpisode& e) {
  std::vector<PhoneToken> out;
  for (const auto& ev : e.events) {
    if (const auto* bout = std::get_if<Bout>(&ev))
      out.insert(out.end(), bout->calls.begin(), bout->calls.end());
    else
      out.push_back(std::get<PhoneToken>(ev));
  }
  return out;
}

// Flattened phones after the inventory's replacement map.
inline std::vector<PhoneToken> canonical_phones(const LaughterEpisode& e,
                                                const PhoneInventory& inv) {
  auto phones = flatten_episode(e);
  for (auto& p : phones) {
    const auto enc = encode(p);
    const auto canon = inv.canonical(enc);
    if (canon != enc) p = decode(canon);
  }
  return phones;
}

// Groups a flat phone sequence back into events: consecutive calls form one
// bout, inhalations stand alone.
inline std::vector<LaughterEvent> group_events(const std::vector<PhoneToken>& phones) {
  std::vector<LaughterEvent> events;
  for (const auto& p : phones) {
    if (p.is_inhalation()) {
      events.emplace_back(p);
    } else {
      if (events.empty() || !std::holds_alternative<Bout>(events.back()))
        events.emplace_back(Bout{});
      std::get<Bout>(events.back()).calls.push_back(p);
    }
  }
  return events;
}

inline std::string join_phones(const std::vector<PhoneToken>& phones) {
  std::string out;
  for (const auto& p : phones) {
    if (!out.empty()) out += ' ';
    out += encode(p);
  }
  return out;
}

inline std::vector<PhoneToken> split_phones(std::string_view text) {
  std::vector<PhoneToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.push_back(decode(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

// Empty string when the episode satisfies every invariant.
inline std::string check_episode(const LaughterEpisode& e) {
  if (e.events.empty()) return "episode '" + e.id + "' has no events";
  if (!is_valid_rating(e.pleasantness) || !is_valid_rating(e.arousal))
    return "episode '" + e.id + "' rating outside [1, 7]";
  for (const auto& ev : e.events) {
    if (const auto* bout = std::get_if<Bout>(&ev)) {
      if (bout->calls.empty()) return "episode '" + e.id + "' has an empty bout";
      for (const auto& c : bout->calls)
        if (!c.is_call() || !is_valid(c))
          return "episode '" + e.id + "' bout holds invalid call '" + encode(c) + "'";
    } else {
      const auto& p = std::get<PhoneToken>(ev);
      if (!p.is_inhalation() || !is_valid(p))
        return "episode '" + e.id + "' has invalid inhalation '" + encode(p) + "'";
    }
  }
  return {};
}

inline void validate(const Corpus& c) {
  for (const auto& e : c.episodes) {
    if (auto why = check_episode(e); !why.empty()) throw DomainError(why);
    for (const auto& p : flatten_episode(e))
      if (!c.inventory.contains(encode(p)))
        throw DomainError("phone '" + encode(p) + "' of episode '" + e.id +
                          "' is not in the inventory");
  }
}

}  // namespace laughgen
