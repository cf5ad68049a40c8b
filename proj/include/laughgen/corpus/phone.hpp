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

#include <optional>
#include <string>
#include <string_view>

#include "laughgen/core/error.hpp"

namespace laughgen {

enum class PhoneKind { kCall, kInhalation };

inline constexpr std::string_view kVowels = "aeiuo";

inline bool is_vowel(char c) { return kVowels.find(c) != std::string_view::npos; }

// One call or inhalation. ASCII encoding:
//   call        [%|~]<consonant>[:]<vowel>   e.g. "hu", "%hu", "~ha", "h:a", "a"
//   inhalation  h | H, with ":" appended when prolonged ("H:")
// "%" marks an unvoiced call, "~" a nasal one, ":" a prolonged consonant.
struct PhoneToken {
  PhoneKind kind = PhoneKind::kCall;
  std::optional<std::string> consonant;
  std::optional<char> vowel;
  bool voiced = true;
  bool nasal = false;
  bool prolonged = false;

  bool is_call() const { return kind == PhoneKind::kCall; }
  bool is_inhalation() const { return kind == PhoneKind::kInhalation; }

  bool operator==(const PhoneToken&) const = default;
};

inline PhoneToken make_call(std::optional<std::string> consonant, char vowel,
                            bool voiced = true, bool nasal = false,
                            bool prolonged = false) {
  return PhoneToken{PhoneKind::kCall, std::move(consonant), vowel, voiced,
                    nasal, prolonged};
}

inline PhoneToken make_inhalation(bool voiced, bool prolonged = false) {
  return PhoneToken{PhoneKind::kInhalation, std::nullopt, std::nullopt, voiced,
                    false, prolonged};
}

// Empty string when valid, otherwise the violated invariant.
inline std::string check_invariants(const PhoneToken& p) {
  if (p.is_call()) {
    if (!p.vowel || !is_vowel(*p.vowel)) return "call without a valid vowel";
    if (p.prolonged && !p.consonant) return "prolongation without consonant";
    if (p.consonant) {
      if (p.consonant->empty()) return "empty consonant";
      for (char c : *p.consonant)
        if (c < 'a' || c > 'z' || is_vowel(c)) return "invalid consonant";
    }
  } else {
    if (p.vowel || p.consonant) return "inhalation with consonant or vowel";
    if (p.nasal) return "nasal inhalation";
  }
  if (p.nasal && !p.voiced) return "nasal phone marked unvoiced";
  return {};
}

inline bool is_valid(const PhoneToken& p) { return check_invariants(p).empty(); }

inline std::string encode(const PhoneToken& p) {
  std::string out;
  if (p.is_inhalation()) {
    out = p.voiced ? "H" : "h";
    if (p.prolonged) out += ':';
    return out;
  }
  if (!p.voiced) out += '%';
  if (p.nasal) out += '~';
  if (p.consonant) out += *p.consonant;
  if (p.prolonged) out += ':';
  if (p.vowel) out += *p.vowel;
  return out;
}

inline PhoneToken decode(std::string_view text) {
  const std::string tok(text);
  auto fail = [&](const std::string& why) -> PhoneToken {
    throw DomainError("invalid phone '" + tok + "': " + why);
  };
  if (text.empty()) return fail("empty token");

  if (text == "h" || text == "H" || text == "h:" || text == "H:")
    return make_inhalation(text[0] == 'H', text.size() == 2);

  PhoneToken p;
  std::size_t pos = 0;
  if (text[pos] == '%') {
    p.voiced = false;
    ++pos;
  }
  if (pos < text.size() && text[pos] == '~') {
    p.nasal = true;
    ++pos;
  }
  if (pos >= text.size()) return fail("missing vowel");
  const char last = text.back();
  if (!is_vowel(last)) {
    if (last >= 'a' && last <= 'z')
      return fail(std::string("invalid vowel '") + last + "'");
    return fail("missing vowel");
  }
  p.vowel = last;
  std::string_view middle = text.substr(pos, text.size() - 1 - pos);
  if (!middle.empty() && middle.back() == ':') {
    p.prolonged = true;
    middle.remove_suffix(1);
  }
  if (!middle.empty()) p.consonant = std::string(middle);
  if (auto why = check_invariants(p); !why.empty()) return fail(why);
  return p;
}

}  // namespace laughgen
