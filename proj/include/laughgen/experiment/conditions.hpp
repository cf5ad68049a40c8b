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

#include <array>
#include <string>
#include <utility>

#include "laughgen/core/error.hpp"

namespace laughgen {

// delta_* is 1 when that module receives the emotion inputs.
struct AblationCondition {
  int delta_phones = 1;
  int delta_acoust = 1;

  friend bool operator==(const AblationCondition&, const AblationCondition&) = default;
  int index() const { return 2 * delta_phones + delta_acoust; }
};

inline constexpr std::array<AblationCondition, 4> kConditions = {
    AblationCondition{0, 0}, AblationCondition{0, 1}, AblationCondition{1, 0},
    AblationCondition{1, 1}};

inline void check_condition(const AblationCondition& c) {
  if ((c.delta_phones != 0 && c.delta_phones != 1) || (c.delta_acoust != 0 && c.delta_acoust != 1))
    throw DomainError("ablation flags must be 0 or 1");
}

inline std::string condition_label(const AblationCondition& c) {
  check_condition(c);
  return std::string(c.delta_phones ? "+" : "-") + "phones" + (c.delta_acoust ? "+" : "-") +
         "acoust";
}

inline AblationCondition parse_condition(const std::string& label) {
  for (const auto& c : kConditions)
    if (condition_label(c) == label) return c;
  throw DomainError("unknown ablation condition '" + label + "'");
}

// Raw (pleasantness, arousal) targets on the 1..7 scale.
inline constexpr std::array<std::pair<int, int>, 10> kTargetGrid = {{
    {4, 4}, {4, 5}, {5, 4}, {5, 5}, {5, 6}, {6, 5}, {6, 6}, {6, 7}, {7, 6}, {7, 7}}};

inline constexpr int kSequencesPerCell = 20;
inline constexpr int kFlaggedPerCell = 10;

}  // namespace laughgen
