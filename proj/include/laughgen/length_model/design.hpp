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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "laughgen/corpus/corpus.hpp"

namespace laughgen {

// Term labels are ':'-joined factor names. "1" is the constant column,
// "baseline:<speaker>" a speaker indicator; any other factor must be a
// variable present in every observation.
inline constexpr std::string_view kIntercept = "1";
inline constexpr std::string_view kBaselinePrefix = "baseline:";
inline constexpr std::string_view kPleasantness = "x_ple";
inline constexpr std::string_view kArousal = "x_aro";
inline constexpr std::string_view kPleAro = "x_ple:x_aro";

inline std::string baseline_term(const std::string& speaker) {
  return std::string(kBaselinePrefix) + speaker;
}

inline bool is_baseline_term(std::string_view term) {
  return term.substr(0, kBaselinePrefix.size()) == kBaselinePrefix ||
         term == kIntercept;
}

struct DesignMatrix {
  Eigen::MatrixXd rows;
  std::vector<std::string> column_labels;

  Eigen::Index n() const { return rows.rows(); }
  Eigen::Index p() const { return rows.cols(); }

  DesignMatrix select(const std::vector<std::string>& labels) const {
    DesignMatrix out{Eigen::MatrixXd(rows.rows(), static_cast<Eigen::Index>(labels.size())),
                     labels};
    for (std::size_t j = 0; j < labels.size(); ++j) {
      auto it = std::find(column_labels.begin(), column_labels.end(), labels[j]);
      if (it == column_labels.end())
        throw DomainError("design has no column '" + labels[j] + "'");
      out.rows.col(static_cast<Eigen::Index>(j)) =
          rows.col(static_cast<Eigen::Index>(it - column_labels.begin()));
    }
    return out;
  }
};

using Observation = std::map<std::string, double, std::less<>>;

inline std::vector<std::string> split_term(std::string_view term) {
  std::vector<std::string> factors;
  std::size_t start = 0;
  while (true) {
    const auto pos = term.find(':', start);
    factors.emplace_back(term.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return factors;
}

// One row per observation; each column is the product of its factors.
inline DesignMatrix build_design(const std::vector<Observation>& obs,
                                 const std::vector<std::string>& terms) {
  DesignMatrix d{Eigen::MatrixXd(static_cast<Eigen::Index>(obs.size()),
                                 static_cast<Eigen::Index>(terms.size())),
                 terms};
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& term = terms[j];
    const bool baseline = term.rfind(kBaselinePrefix, 0) == 0;
    const auto factors = baseline ? std::vector<std::string>{term} : split_term(term);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      double v = 1.0;
      if (term != kIntercept) {
        for (const auto& f : factors) {
          auto it = obs[i].find(f);
          if (it == obs[i].end()) {
            if (baseline) { v = 0.0; break; }
            throw DomainError("unknown term '" + term + "'");
          }
          v *= it->second;
        }
      }
      if (!std::isfinite(v)) throw DomainError("non-finite design entry in '" + term + "'");
      d.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return d;
}

inline Observation length_observation(const SpeakerId& s, const EmotionPoint& e) {
  return {{baseline_term(s.name), 1.0},
          {std::string(kPleasantness), e.pleasantness},
          {std::string(kArousal), e.arousal}};
}

using LengthInputs = std::vector<std::pair<SpeakerId, EmotionPoint>>;

inline DesignMatrix build_design(
    const LengthInputs& episodes,
    const std::vector<std::string>& terms) {
  for (const auto& t : terms) {
    if (t.rfind(kBaselinePrefix, 0) == 0 || t == kIntercept) continue;
    for (const auto& f : split_term(t))
      if (f != kPleasantness && f != kArousal)
        throw DomainError("unknown term '" + t + "'");
  }
  std::vector<Observation> obs;
  obs.reserve(episodes.size());
  for (const auto& [s, e] : episodes) obs.push_back(length_observation(s, e));
  return build_design(obs, terms);
}

}  // namespace laughgen
