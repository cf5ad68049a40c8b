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

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "laughgen/core/rng.hpp"
#include "laughgen/experiment/conditions.hpp"
#include "laughgen/length_model/length_model.hpp"

namespace laughgen {

enum class ResponseDimension { kPleasantness, kArousal };

inline std::string dimension_name(ResponseDimension d) {
  return d == ResponseDimension::kPleasantness ? "ple" : "aro";
}

inline constexpr const char* kDeltaPhones = "d_phones";
inline constexpr const char* kDeltaAcoust = "d_acoust";
inline constexpr const char* kTarget = "x";

inline std::vector<std::string> response_term_pool() {
  return {"1",
          "d_phones",
          "d_acoust",
          "d_phones:d_acoust",
          "x",
          "d_phones:x",
          "d_acoust:x",
          "d_phones:d_acoust:x"};
}

// One stimulus: condition flags, scaled target x and scaled response y.
struct ResponseObservation {
  AblationCondition condition;
  double x = 0.0;
  double y = 0.0;
};

struct ResponseModel {
  ResponseDimension dimension = ResponseDimension::kPleasantness;
  std::vector<std::string> terms;
  Eigen::VectorXd coefficients;
  double aic = 0.0;
  std::size_t n = 0;

  bool has(const std::string& term) const {
    return std::find(terms.begin(), terms.end(), term) != terms.end();
  }
  double coefficient(const std::string& term) const {
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (terms[j] == term) return coefficients[static_cast<Eigen::Index>(j)];
    return 0.0;
  }
};

inline DesignMatrix response_design(const std::vector<ResponseObservation>& obs,
                                    const std::vector<std::string>& terms) {
  std::vector<Observation> rows;
  rows.reserve(obs.size());
  for (const auto& o : obs) {
    check_condition(o.condition);
    rows.push_back({{kDeltaPhones, o.condition.delta_phones},
                    {kDeltaAcoust, o.condition.delta_acoust},
                    {kTarget, o.x}});
  }
  return build_design(rows, terms);
}

// Stepwise AIC over the full pool starting from the empty model, then OLS on
// the selected terms.
inline ResponseModel fit_response_model(const std::vector<ResponseObservation>& obs,
                                        ResponseDimension dim) {
  if (obs.size() < 40) throw DomainError("response model needs at least 40 stimuli");
  std::set<int> seen;
  for (const auto& o : obs) seen.insert(o.condition.index());
  if (seen.size() != kConditions.size())
    throw DomainError("response model needs stimuli from all four conditions");
  Eigen::VectorXd y(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) y[static_cast<Eigen::Index>(i)] = obs[i].y;
  const auto X = response_design(obs, response_term_pool());
  const auto sel = stepwise_select(X, y, Family::kGaussian, {});
  const auto fit = fit_ols(X.select(sel.terms), y);
  return ResponseModel{dim, sel.terms, fit.beta, fit.aic, obs.size()};
}

using ResponseTruth = std::map<std::string, double>;

// Reference best models, in scaled units.
inline ResponseTruth reference_response_truth(ResponseDimension d) {
  if (d == ResponseDimension::kPleasantness)
    return {{"1", 0.112},          {"d_phones", -0.301},  {"d_acoust", -0.199},
            {"d_phones:d_acoust", 0.141}, {"d_phones:x", 0.669}, {"d_acoust:x", 0.489},
            {"d_phones:d_acoust:x", -0.321}};
  return {{"d_phones", -0.265},   {"d_acoust", -0.198},  {"d_phones:d_acoust", 0.171},
          {"d_phones:x", 0.661},  {"d_acoust:x", 0.561}, {"d_phones:d_acoust:x", -0.375}};
}

inline double scaled_target(const std::pair<int, int>& target, ResponseDimension d) {
  const int raw = d == ResponseDimension::kPleasantness ? target.first : target.second;
  return (raw - 4.0) / 3.0;
}

// kTargetGrid x kConditions x per_cell stimuli with y left at 0.
inline std::vector<ResponseObservation> grid_layout(ResponseDimension d,
                                                    int per_cell = kFlaggedPerCell) {
  std::vector<ResponseObservation> out;
  for (const auto& t : kTargetGrid)
    for (const auto& c : kConditions)
      for (int i = 0; i < per_cell; ++i) out.push_back({c, scaled_target(t, d), 0.0});
  return out;
}

inline double evaluate_truth(const ResponseTruth& truth, const ResponseObservation& o) {
  const auto X = response_design({o}, [&] {
    std::vector<std::string> terms;
    for (const auto& [t, b] : truth) terms.push_back(t);
    return terms;
  }());
  double y = 0.0;
  Eigen::Index j = 0;
  for (const auto& [t, b] : truth) y += b * X.rows(0, j++);
  return y;
}

// Fills y with truth + N(0, sigma^2).
inline std::vector<ResponseObservation> synthetic_responses(std::vector<ResponseObservation> layout,
                                                            const ResponseTruth& truth,
                                                            double sigma, std::uint64_t seed) {
  if (!(sigma >= 0)) throw DomainError("noise sd must be >= 0");
  Rng rng(seed);
  for (auto& o : layout) o.y = evaluate_truth(truth, o) + sigma * rng.normal();
  return layout;
}

inline nlohmann::json to_json(const ResponseModel& m) {
  nlohmann::json coef = nlohmann::json::object();
  for (std::size_t j = 0; j < m.terms.size(); ++j)
    coef[m.terms[j]] = m.coefficients[static_cast<Eigen::Index>(j)];
  return {{"dimension", dimension_name(m.dimension)},
          {"terms", m.terms},
          {"coefficients", coef},
          {"aic", m.aic},
          {"n", m.n}};
}

}  // namespace laughgen
