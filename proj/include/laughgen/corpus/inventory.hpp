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
#include <set>
#include <string>
#include <vector>

#include "laughgen/corpus/corpus.hpp"

namespace laughgen {

// Successively coarser stand-ins for a rare phone, in fixed priority:
// drop prolongation, drop nasality, consonant -> "h", drop voicelessness.
// Each step builds on the previous one; vowel and (until the last step)
// voicing are preserved.
inline std::vector<PhoneToken> similarity_chain(const PhoneToken& p) {
  std::vector<PhoneToken> chain;
  PhoneToken q = p;
  q.prolonged = false;
  chain.push_back(q);
  q.nasal = false;
  chain.push_back(q);
  if (q.is_call()) q.consonant = "h";
  chain.push_back(q);
  q.voiced = true;
  chain.push_back(q);
  return chain;
}

// Last-resort target when nothing in the chain is frequent: a bare voiced
// "h" + vowel call, or a plain voiced inhalation.
inline PhoneToken fallback_phone(const PhoneToken& p) {
  if (p.is_inhalation()) return make_inhalation(true);
  return make_call(std::string("h"), *p.vowel);
}

// Maps p onto the first member of its similarity chain found in targets.
// Returns the fallback phone when none is present.
inline PhoneToken nearest_phone(const PhoneToken& p,
                                const std::set<std::string>& targets) {
  if (targets.count(encode(p))) return p;
  for (const auto& q : similarity_chain(p))
    if (targets.count(encode(q))) return q;
  return fallback_phone(p);
}

inline std::map<std::string, std::size_t> count_phones(const Corpus& c) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : c.episodes)
    for (const auto& p : flatten_episode(e)) ++counts[encode(p)];
  return counts;
}

// Tokens seen fewer than min_count times are folded into their most similar
// frequent token. Token order follows first appearance in the corpus, with
// fallback targets appended where first needed.
inline PhoneInventory build_inventory(const Corpus& c, std::size_t min_count) {
  if (min_count < 1) throw DomainError("min_count must be >= 1");
  if (c.episodes.empty()) throw DomainError("cannot build inventory of empty corpus");
  const auto counts = count_phones(c);

  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& e : c.episodes)
    for (const auto& p : flatten_episode(e))
      if (seen.insert(encode(p)).second) order.push_back(encode(p));

  std::set<std::string> frequent;
  for (const auto& [tok, n] : counts)
    if (n >= min_count) frequent.insert(tok);

  std::map<std::string, std::string> replacements;
  std::set<std::string> kept;
  for (const auto& tok : order) {
    if (frequent.count(tok)) {
      kept.insert(tok);
      continue;
    }
    const auto target = encode(nearest_phone(decode(tok), frequent));
    if (target != tok) replacements[tok] = target;
    kept.insert(target);
  }

  std::vector<std::string> tokens;
  std::set<std::string> emitted;
  for (const auto& tok : order) {
    const auto canon = replacements.count(tok) ? replacements[tok] : tok;
    if (kept.count(canon) && emitted.insert(canon).second) tokens.push_back(canon);
  }
  return PhoneInventory(std::move(tokens), std::move(replacements));
}

}  // namespace laughgen
