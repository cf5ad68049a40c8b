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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "laughgen/core/error.hpp"
#include "laughgen/corpus/corpus.hpp"
#include "laughgen/corpus/phone.hpp"

namespace laughgen {

inline constexpr Eigen::Index kCvIdentities = 19;
inline constexpr Eigen::Index kContextBlock = kCvIdentities + 2;  // one-hot + voiced, nasal
inline constexpr Eigen::Index kDurationDim = 3 * kContextBlock + 4;
inline constexpr Eigen::Index kAcousticDim = kDurationDim + 1 + 3;

static_assert(kDurationDim == 67);
static_assert(kAcousticDim == 71);

// CV identity table (voicing and nasality are separate flags):
//   0..4    bare vowel          a e i u o
//   5..9    h + vowel
//   10..14  prolonged h + vowel
//   15      other consonant + any vowel
//   16      other prolonged consonant + any vowel
//   17      inhalation
//   18      prolonged inhalation
inline int cv_identity(const PhoneToken& p) {
  check_invariants(p);
  if (!p.is_call()) return p.prolonged ? 18 : 17;
  const auto v = static_cast<int>(kVowels.find(*p.vowel));
  if (!p.consonant) return v;
  if (*p.consonant == "h") return (p.prolonged ? 10 : 5) + v;
  return p.prolonged ? 16 : 15;
}

inline std::string cv_label(int id) {
  if (id < 0 || id >= kCvIdentities) throw DomainError("CV identity out of range");
  if (id == 17) return "inhalation";
  if (id == 18) return "prolonged inhalation";
  if (id == 15) return "C+V";
  if (id == 16) return "C:+V";
  const char v = kVowels[static_cast<std::size_t>(id % 5)];
  return (id < 5 ? "" : id < 10 ? "h" : "h:") + std::string(1, v);
}

// 67 x N, one column per phone:
//   [0,21)   current CV one-hot + (voiced, nasal)
//   [21,42)  left context, zero at the first phone
//   [42,63)  right context, zero at the last phone
//   63       index / length
//   64       length in phones
//   65, 66   scaled pleasantness, arousal
inline Eigen::MatrixXd build_duration_features(const std::vector<PhoneToken>& phones,
                                               const EmotionPoint& emotion) {
  if (phones.empty()) throw DomainError("duration features need at least one phone");
  const auto N = static_cast<Eigen::Index>(phones.size());
  std::vector<int> ids;
  for (const auto& p : phones) ids.push_back(cv_identity(p));
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(kDurationDim, N);
  auto fill = [&](Eigen::Index col, Eigen::Index offset, Eigen::Index k) {
    const auto& p = phones[static_cast<std::size_t>(k)];
    F(offset + ids[static_cast<std::size_t>(k)], col) = 1.0;
    F(offset + kCvIdentities, col) = p.voiced;
    F(offset + kCvIdentities + 1, col) = p.nasal;
  };
  for (Eigen::Index n = 0; n < N; ++n) {
    fill(n, 0, n);
    if (n > 0) fill(n, kContextBlock, n - 1);
    if (n + 1 < N) fill(n, 2 * kContextBlock, n + 1);
    F(3 * kContextBlock, n) = static_cast<double>(n) / static_cast<double>(N);
    F(3 * kContextBlock + 1, n) = static_cast<double>(N);
    F(3 * kContextBlock + 2, n) = emotion.pleasantness;
    F(3 * kContextBlock + 3, n) = emotion.arousal;
  }
  return F;
}

inline constexpr double kCoarseSigma = 0.25;

inline Eigen::Vector3d coarse_code_position(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("frame position must lie in [0, 1]");
  Eigen::Vector3d out;
  const double centers[] = {0.0, 0.5, 1.0};
  for (int k = 0; k < 3; ++k)
    out[k] = std::exp(-(t - centers[k]) * (t - centers[k]) / (2.0 * kCoarseSigma * kCoarseSigma));
  return out;
}

// Position of frame k within a phone of d frames.
inline double frame_position(int k, int d) { return static_cast<double>(k) / d; }

// 71 x sum(durations): the phone's 67 features, its duration in frames, and
// the coarse-coded position of the frame inside the phone.
inline Eigen::MatrixXd build_acoustic_features(const std::vector<PhoneToken>& phones,
                                               const EmotionPoint& emotion,
                                               const std::vector<int>& durations) {
  if (durations.size() != phones.size())
    throw DomainError("need one duration per phone");
  long total = 0;
  for (int d : durations) {
    if (d < 1) throw DomainError("phone durations must be >= 1 frame");
    total += d;
  }
  const Eigen::MatrixXd D = build_duration_features(phones, emotion);
  Eigen::MatrixXd A(kAcousticDim, total);
  Eigen::Index col = 0;
  for (std::size_t n = 0; n < phones.size(); ++n) {
    const int d = durations[n];
    for (int k = 0; k < d; ++k, ++col) {
      A.col(col).head(kDurationDim) = D.col(static_cast<Eigen::Index>(n));
      A(kDurationDim, col) = d;
      A.col(col).tail(3) = coarse_code_position(frame_position(k, d));
    }
  }
  return A;
}

// Output frame layout: statics [mcep 0..59, log f0, aperiodicity], then
// their deltas and delta-deltas, then voicedness.
inline constexpr Eigen::Index kMelCepOrder = 60;
inline constexpr Eigen::Index kStaticDim = kMelCepOrder + 2;
inline constexpr Eigen::Index kLogF0 = kMelCepOrder;
inline constexpr Eigen::Index kAperiodicity = kMelCepOrder + 1;
inline constexpr Eigen::Index kFrameDim = 3 * kStaticDim + 1;
inline constexpr Eigen::Index kVoicedness = kFrameDim - 1;

static_assert(kFrameDim == 187);

// Frames as columns of a 187 x T matrix.
struct FeatureTrack {
  Eigen::MatrixXd frames;

  Eigen::Index size() const { return frames.cols(); }
  auto mel_cepstrum(Eigen::Index t) const { return frames.col(t).head(kMelCepOrder); }
  double log_f0(Eigen::Index t) const { return frames(kLogF0, t); }
  double aperiodicity(Eigen::Index t) const { return frames(kAperiodicity, t); }
  double voicedness(Eigen::Index t) const { return frames(kVoicedness, t); }
  auto statics() const { return frames.topRows(kStaticDim); }
};

inline void clamp_unit_fields(FeatureTrack& f) {
  for (Eigen::Index t = 0; t < f.size(); ++t) {
    f.frames(kAperiodicity, t) = std::clamp(f.frames(kAperiodicity, t), 0.0, 1.0);
    f.frames(kVoicedness, t) = std::clamp(f.frames(kVoicedness, t), 0.0, 1.0);
  }
}

}  // namespace laughgen
