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
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "laughgen/acoustic/features.hpp"
#include "laughgen/acoustic/mlpg.hpp"
#include "laughgen/corpus/corpus.hpp"

namespace laughgen {

inline constexpr double kFrameShiftMs = 5.0;
inline constexpr double kSampleRate = 16000.0;
inline constexpr double kWarpAlpha = 0.42;

// First-order all-pass frequency warp on [0, pi].
inline double warp_frequency(double omega, double alpha) {
  return omega + 2.0 * std::atan(alpha * std::sin(omega) / (1.0 - alpha * std::cos(omega)));
}

struct SpectralTemplate {
  std::array<double, 3> formant_hz;
  std::array<double, 3> bandwidth_hz;
  std::array<double, 3> gain;
};

// Lorentzian formant peaks over a -40 dB floor.
inline double template_log_envelope(const SpectralTemplate& s, double hz) {
  double a = 0.01;
  for (int k = 0; k < 3; ++k) {
    const double z = (hz - s.formant_hz[k]) / s.bandwidth_hz[k];
    a += s.gain[k] / (1.0 + z * z);
  }
  return std::log(a);
}

// Mel-cepstrum of a log envelope: cosine transform over the warped axis.
template <typename F>
Eigen::VectorXd log_envelope_to_melcep(F log_envelope, double alpha = kWarpAlpha,
                                       Eigen::Index order = kMelCepOrder) {
  constexpr int N = 1024;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(order);
  for (int j = 0; j < N; ++j) {
    const double theta = std::numbers::pi * (j + 0.5) / N;
    const double omega = warp_frequency(theta, -alpha);
    const double v = log_envelope(omega * kSampleRate / (2.0 * std::numbers::pi));
    for (Eigen::Index m = 0; m < order; ++m)
      c[m] += v * std::cos(static_cast<double>(m) * theta) * (m ? 2.0 : 1.0) / N;
  }
  return c;
}

// Vowel templates in "aeiuo" order, then the breathy inhalation template.
inline const std::array<SpectralTemplate, 6>& spectral_templates() {
  static const std::array<SpectralTemplate, 6> t{{
      {{800, 1200, 2500}, {90, 110, 160}, {1.0, 0.6, 0.25}},
      {{500, 1800, 2500}, {80, 110, 160}, {1.0, 0.5, 0.3}},
      {{300, 2300, 3000}, {70, 120, 170}, {1.0, 0.35, 0.3}},
      {{350, 1300, 2400}, {80, 110, 160}, {1.0, 0.4, 0.2}},
      {{500, 900, 2400}, {80, 100, 160}, {1.0, 0.7, 0.15}},
      {{1200, 2800, 5000}, {800, 1200, 1500}, {0.6, 0.5, 0.3}},
  }};
  return t;
}

inline const std::array<Eigen::VectorXd, 6>& template_melceps() {
  static const std::array<Eigen::VectorXd, 6> c = [] {
    std::array<Eigen::VectorXd, 6> out;
    for (std::size_t k = 0; k < 6; ++k)
      out[k] = log_envelope_to_melcep(
          [&](double hz) { return template_log_envelope(spectral_templates()[k], hz); });
    return out;
  }();
  return c;
}

inline double speaker_base_log_f0(const SpeakerId& s) {
  return s.code < 0.5 ? std::log(120.0) : std::log(220.0);
}

struct ReferenceRender {
  std::vector<int> durations;
  FeatureTrack track;
};

// Rule table:
//   duration     calls round(30 * (1 + 0.3 aro)) frames, inhalations 40
//   log f0       speaker base + 0.2 ple + 0.1 aro, calls fall by 0.15 across
//                the phone, inhalations sit 0.1 lower and stay flat
//   voicing      voicedness 1 / 0, aperiodicity 0.1 / 0.9
//   mcep         per-phone target: vowel (or inhalation) template, with
//                -1.0 on c0 for inhalations, -0.3 on c1 for nasal calls and
//                -0.2 on c1 for unvoiced calls; the second half of each phone
//                moves toward the next target with weight
//                0.5 (1 - cos(pi |u - 1/2|)), the first half mirrors that
//                from the previous one (u = (k + 1/2) / d); c0 then adds
//                log(0.25 + 0.75 sin(pi u)) and 0.3 aro
inline Eigen::VectorXd reference_mcep_target(const PhoneToken& p) {
  Eigen::VectorXd v = template_melceps()[p.is_call() ? kVowels.find(*p.vowel) : std::size_t{5}];
  if (!p.is_call()) v[0] -= 1.0;
  if (p.nasal) v[1] -= 0.3;
  if (p.is_call() && !p.voiced) v[1] -= 0.2;
  return v;
}

inline int reference_duration(const PhoneToken& p, const EmotionPoint& e) {
  return p.is_call() ? static_cast<int>(std::lround(30.0 * (1.0 + 0.3 * e.arousal))) : 40;
}

inline ReferenceRender reference_render(const std::vector<PhoneToken>& phones,
                                        const EmotionPoint& e, const SpeakerId& speaker) {
  if (phones.empty()) throw DomainError("cannot render an empty phone sequence");
  ReferenceRender r;
  long total = 0;
  for (const auto& p : phones) {
    check_invariants(p);
    r.durations.push_back(reference_duration(p, e));
    total += r.durations.back();
  }
  auto& F = r.track.frames;
  F = Eigen::MatrixXd::Zero(kFrameDim, total);
  const double base = speaker_base_log_f0(speaker) + 0.2 * e.pleasantness + 0.1 * e.arousal;
  Eigen::Index col = 0;
  for (std::size_t n = 0; n < phones.size(); ++n) {
    const auto& p = phones[n];
    const int d = r.durations[n];
    const Eigen::VectorXd own = reference_mcep_target(p);
    const Eigen::VectorXd prev = n > 0 ? reference_mcep_target(phones[n - 1]) : own;
    const Eigen::VectorXd next = n + 1 < phones.size() ? reference_mcep_target(phones[n + 1]) : own;
    for (int k = 0; k < d; ++k, ++col) {
      const double t = frame_position(k, d);
      const double u = (k + 0.5) / d;
      auto f = F.col(col);
      const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * std::abs(u - 0.5)));
      f.head(kMelCepOrder) = (1.0 - w) * own + w * (u < 0.5 ? prev : next);
      f[0] += std::log(0.25 + 0.75 * std::sin(std::numbers::pi * u)) + 0.3 * e.arousal;
      f[kLogF0] = p.is_call() ? base - 0.15 * t : base - 0.1;
      f[kAperiodicity] = p.voiced ? 0.1 : 0.9;
      f[kVoicedness] = p.voiced ? 1.0 : 0.0;
    }
  }
  fill_deltas(r.track);
  return r;
}

}  // namespace laughgen
