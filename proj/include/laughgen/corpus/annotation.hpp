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

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "laughgen/corpus/corpus.hpp"
#include "laughgen/corpus/inventory.hpp"

namespace laughgen {

inline constexpr int kAnnotationFormatVersion = 1;

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + offset, '\n'));
}

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(where + ": field '" + key + "' has the wrong type");
  }
}

inline PhoneToken parse_phone(const std::string& tok, const std::string& where) {
  try {
    return decode(tok);
  } catch (const DomainError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace detail

// Reads an annotation document. Without an "inventory" section the inventory
// is the set of observed tokens in first-appearance order.
inline Corpus parse_annotation(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what(),
                     detail::line_of_offset(text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("annotation root must be an object", 1);
  const int version = detail::required<int>(doc, "format_version", "document");
  if (version != kAnnotationFormatVersion)
    throw ParseError("unsupported format_version " + std::to_string(version));

  Corpus c;
  if (doc.contains("speakers")) {
    c.speakers.clear();
    for (const auto& s : doc.at("speakers")) {
      SpeakerId sp{detail::required<std::string>(s, "name", "speaker"),
                   detail::required<double>(s, "code", "speaker")};
      for (const auto& o : c.speakers)
        if (o.name == sp.name) throw ParseError("duplicate speaker '" + sp.name + "'");
      c.speakers.push_back(sp);
    }
  }

  const auto& eps = doc.contains("episodes") ? doc.at("episodes") : nlohmann::json::array();
  if (!eps.is_array()) throw ParseError("'episodes' must be an array");
  for (const auto& je : eps) {
    LaughterEpisode e;
    e.id = detail::required<std::string>(je, "id", "episode");
    const std::string where = "episode '" + e.id + "'";
    const auto spk = detail::required<std::string>(je, "speaker", where);
    try {
      e.speaker = c.speaker(spk);
    } catch (const DomainError& err) {
      throw ParseError(where + ": " + err.what());
    }
    e.pleasantness = detail::required<double>(je, "pleasantness", where);
    e.arousal = detail::required<double>(je, "arousal", where);
    if (!is_valid_rating(e.pleasantness) || !is_valid_rating(e.arousal))
      throw ParseError(where + ": rating outside [1, 7]");
    const auto& evs = je.contains("events") ? je.at("events") : nlohmann::json();
    if (!evs.is_array() || evs.empty()) throw ParseError(where + ": empty episode");
    for (const auto& jv : evs) {
      const auto type = detail::required<std::string>(jv, "type", where);
      if (type == "bout") {
        Bout b;
        for (const auto& jc : detail::required<std::vector<std::string>>(jv, "calls", where)) {
          auto p = detail::parse_phone(jc, where);
          if (!p.is_call())
            throw ParseError(where + ": '" + jc + "' is not a call");
          b.calls.push_back(std::move(p));
        }
        if (b.calls.empty()) throw ParseError(where + ": empty bout");
        e.events.emplace_back(std::move(b));
      } else if (type == "inhalation") {
        const auto tok = detail::required<std::string>(jv, "token", where);
        auto p = detail::parse_phone(tok, where);
        if (!p.is_inhalation())
          throw ParseError(where + ": '" + tok + "' is not an inhalation");
        e.events.emplace_back(std::move(p));
      } else {
        throw ParseError(where + ": unknown event type '" + type + "'");
      }
    }
    c.episodes.push_back(std::move(e));
  }

  if (doc.contains("inventory")) {
    const auto& ji = doc.at("inventory");
    try {
      c.inventory = PhoneInventory(
          detail::required<std::vector<std::string>>(ji, "tokens", "inventory"),
          ji.contains("replacements")
              ? ji.at("replacements").get<std::map<std::string, std::string>>()
              : std::map<std::string, std::string>{});
    } catch (const DomainError& err) {
      throw ParseError(std::string("inventory: ") + err.what());
    }
  } else if (!c.episodes.empty()) {
    c.inventory = build_inventory(c, 1);
  }
  try {
    validate(c);
  } catch (const DomainError& err) {
    throw ParseError(err.what());
  }
  return c;
}

inline nlohmann::json annotation_json(const Corpus& c) {
  nlohmann::json doc;
  doc["format_version"] = kAnnotationFormatVersion;
  doc["speakers"] = nlohmann::json::array();
  for (const auto& s : c.speakers)
    doc["speakers"].push_back({{"name", s.name}, {"code", s.code}});
  doc["episodes"] = nlohmann::json::array();
  for (const auto& e : c.episodes) {
    nlohmann::json je{{"id", e.id},
                      {"speaker", e.speaker.name},
                      {"pleasantness", e.pleasantness},
                      {"arousal", e.arousal}};
    je["events"] = nlohmann::json::array();
    for (const auto& ev : e.events) {
      if (const auto* b = std::get_if<Bout>(&ev)) {
        nlohmann::json calls = nlohmann::json::array();
        for (const auto& p : b->calls) calls.push_back(encode(p));
        je["events"].push_back({{"type", "bout"}, {"calls", calls}});
      } else {
        je["events"].push_back(
            {{"type", "inhalation"}, {"token", encode(std::get<PhoneToken>(ev))}});
      }
    }
    doc["episodes"].push_back(std::move(je));
  }
  if (c.inventory.size() > 0) {
    doc["inventory"] = {{"tokens", c.inventory.tokens()},
                        {"replacements", c.inventory.replacements()}};
  }
  return doc;
}

inline std::string serialize_annotation(const Corpus& c) {
  return annotation_json(c).dump(2) + "\n";
}

inline Corpus load_annotation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotation file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_annotation(ss.str());
}

inline void save_annotation(const Corpus& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write annotation file '" + path + "'");
  out << serialize_annotation(c);
}

}  // namespace laughgen
