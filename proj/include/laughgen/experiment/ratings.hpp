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
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "laughgen/core/error.hpp"
#include "laughgen/corpus/corpus.hpp"

namespace laughgen {

struct RatingRecord {
  std::string stimulus_id;
  std::string subject_id;
  double rating_ple = 4.0;
  double rating_aro = 4.0;
};

inline constexpr std::string_view kRatingsHeader = "stimulus_id,subject_id,rating_ple,rating_aro";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_rating(std::string_view s, const char* field, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(std::string(field) + " is not a number: '" + std::string(s) + "'", line);
  if (!is_valid_rating(v))
    throw ParseError(std::string(field) + " outside [1, 7]: " + std::string(s), line);
  return v;
}

}  // namespace detail

inline std::vector<RatingRecord> parse_ratings_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  std::vector<RatingRecord> out;
  while (std::getline(in, raw)) {
    ++line;
    const auto row = detail::trim(raw);
    if (row.empty()) continue;
    if (!header) {
      if (row != kRatingsHeader)
        throw ParseError("expected header '" + std::string(kRatingsHeader) + "'", line);
      header = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      fields.push_back(detail::trim(row.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4)
      throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line);
    if (fields[0].empty() || fields[1].empty())
      throw ParseError("empty stimulus or subject id", line);
    out.push_back({std::string(fields[0]), std::string(fields[1]),
                   detail::parse_rating(fields[2], "rating_ple", line),
                   detail::parse_rating(fields[3], "rating_aro", line)});
  }
  if (!header) throw ParseError("ratings file is empty");
  if (out.empty()) throw ParseError("ratings file has no rows");
  return out;
}

inline std::vector<RatingRecord> load_ratings_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open ratings file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_ratings_csv(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// A subject is dropped when its mean pleasantness for the pleasant reference
// is not above that for the unpleasant one, or when repeated ratings of any
// one stimulus span more than max_repeat_spread on either scale. The
// reference check is skipped for subjects who rated neither reference.
struct ScreeningConfig {
  std::string pleasant_reference = "ref_pleasant";
  std::string unpleasant_reference = "ref_unpleasant";
  double max_repeat_spread = 2.0;
};

struct ScreeningResult {
  std::vector<std::string> kept;
  std::map<std::string, std::string> excluded;  // subject -> reason
};

inline ScreeningResult screen_subjects(const std::vector<RatingRecord>& records,
                                       const ScreeningConfig& cfg = {}) {
  struct Span {
    double lo_p = 8, hi_p = 0, lo_a = 8, hi_a = 0, sum_p = 0;
    int n = 0;
  };
  std::map<std::string, std::map<std::string, Span>> by_subject;
  for (const auto& r : records) {
    auto& s = by_subject[r.subject_id][r.stimulus_id];
    s.lo_p = std::min(s.lo_p, r.rating_ple);
    s.hi_p = std::max(s.hi_p, r.rating_ple);
    s.lo_a = std::min(s.lo_a, r.rating_aro);
    s.hi_a = std::max(s.hi_a, r.rating_aro);
    s.sum_p += r.rating_ple;
    ++s.n;
  }
  ScreeningResult out;
  for (const auto& [subject, stimuli] : by_subject) {
    std::string reason;
    for (const auto& [id, s] : stimuli)
      if (s.hi_p - s.lo_p > cfg.max_repeat_spread || s.hi_a - s.lo_a > cfg.max_repeat_spread) {
        reason = "inconsistent repeated ratings of " + id;
        break;
      }
    const auto pos = stimuli.find(cfg.pleasant_reference);
    const auto neg = stimuli.find(cfg.unpleasant_reference);
    if (reason.empty() && (pos != stimuli.end() || neg != stimuli.end())) {
      if (pos == stimuli.end() || neg == stimuli.end())
        reason = "rated only one reference";
      else if (!(pos->second.sum_p / pos->second.n > neg->second.sum_p / neg->second.n))
        reason = "pleasant reference not rated above unpleasant reference";
    }
    if (reason.empty())
      out.kept.push_back(subject);
    else
      out.excluded.emplace(subject, reason);
  }
  return out;
}

struct MeanRating {
  double ple = 0.0;
  double aro = 0.0;
  std::size_t subjects = 0;
};

struct IngestResult {
  std::map<std::string, MeanRating> means;  // reference stimuli left out
  ScreeningResult screening;
};

// Screens, averages each kept subject's repetitions, then averages over
// subjects. Ids outside known_ids (other than the references) are errors.
inline IngestResult ingest_ratings(const std::vector<RatingRecord>& records,
                                   const std::set<std::string>& known_ids,
                                   const ScreeningConfig& cfg = {}) {
  if (records.empty()) throw ParseError("no ratings to ingest");
  auto is_reference = [&](const std::string& id) {
    return id == cfg.pleasant_reference || id == cfg.unpleasant_reference;
  };
  for (const auto& r : records)
    if (!is_reference(r.stimulus_id) && !known_ids.count(r.stimulus_id))
      throw DomainError("unknown stimulus id '" + r.stimulus_id + "'");
  IngestResult out;
  out.screening = screen_subjects(records, cfg);
  const std::set<std::string> kept(out.screening.kept.begin(), out.screening.kept.end());
  struct Acc {
    double p = 0, a = 0;
    int n = 0;
  };
  std::map<std::string, std::map<std::string, Acc>> per;  // stimulus -> subject
  for (const auto& r : records) {
    if (is_reference(r.stimulus_id) || !kept.count(r.subject_id)) continue;
    auto& acc = per[r.stimulus_id][r.subject_id];
    acc.p += r.rating_ple;
    acc.a += r.rating_aro;
    ++acc.n;
  }
  for (const auto& [id, subjects] : per) {
    MeanRating m;
    for (const auto& [subject, acc] : subjects) {
      m.ple += acc.p / acc.n;
      m.aro += acc.a / acc.n;
    }
    m.subjects = subjects.size();
    m.ple /= static_cast<double>(m.subjects);
    m.aro /= static_cast<double>(m.subjects);
    out.means.emplace(id, m);
  }
  return out;
}

}  // namespace laughgen
