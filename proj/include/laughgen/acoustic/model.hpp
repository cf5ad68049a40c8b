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

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "laughgen/acoustic/features.hpp"
#include "laughgen/acoustic/mlpg.hpp"
#include "laughgen/acoustic/network.hpp"
#include "laughgen/acoustic/reference.hpp"
#include "laughgen/corpus/corpus.hpp"

namespace laughgen {

// Duration net: 67 -> log frames per phone. Acoustic net: 71 -> 187 per frame.
struct AcousticModel {
  SpeakerId speaker;
  bool mask_emotion = false;
  SeqRegressor duration_net;
  SeqRegressor acoustic_net;
  int version = 1;
};

inline AcousticModel init_acoustic_model(const SpeakerId& speaker, std::uint64_t seed,
                                         Eigen::Index hidden = 128, int layers = 3) {
  Rng rng(seed);
  AcousticModel m;
  m.speaker = speaker;
  m.duration_net = SeqRegressor::create({kDurationDim, hidden, layers, 1}, rng.split().state());
  m.acoustic_net = SeqRegressor::create({kAcousticDim, hidden, layers, kFrameDim}, rng.split().state());
  return m;
}

inline EmotionPoint model_emotion(const AcousticModel& m, const EmotionPoint& e) {
  return m.mask_emotion ? EmotionPoint{} : e;
}

inline std::vector<int> predict_durations(const SeqRegressor& net, const Eigen::MatrixXd& features) {
  if (features.rows() != kDurationDim || net.dims.output != 1)
    throw DomainError("duration net expects 67-dim phone features");
  const Eigen::MatrixXd y = net.predict(features);
  std::vector<int> out;
  for (Eigen::Index n = 0; n < y.cols(); ++n) {
    const double frames = std::exp(std::min(y(0, n), 10.0));
    out.push_back(std::max(1, static_cast<int>(std::lround(frames))));
  }
  return out;
}

inline FeatureTrack predict_acoustic_frames(const SeqRegressor& net, const Eigen::MatrixXd& features) {
  if (features.rows() != kAcousticDim || net.dims.output != kFrameDim)
    throw DomainError("acoustic net expects 71-dim frame features");
  FeatureTrack f{net.predict(features)};
  clamp_unit_fields(f);
  return f;
}

struct RenderedFeatures {
  std::vector<int> durations;
  FeatureTrack track;
};

// Durations, frame prediction, then MLPG smoothing of the statics with the
// training-target variances.
inline RenderedFeatures render_features(const AcousticModel& m, const std::vector<PhoneToken>& phones,
                                        const EmotionPoint& emotion, bool smooth = true) {
  const auto e = model_emotion(m, emotion);
  RenderedFeatures r;
  r.durations = predict_durations(m.duration_net, build_duration_features(phones, e));
  r.track = predict_acoustic_frames(m.acoustic_net, build_acoustic_features(phones, e, r.durations));
  if (smooth) smooth_track(r.track, m.acoustic_net.output.scale.array().square().matrix());
  return r;
}

// Equal total loss weight for each stream: energy (c0), spectral shape
// (c1..c59), log f0 and aperiodicity, each as static, delta and
// delta-delta, plus voicedness. Mean weight is 1.
inline Eigen::VectorXd stream_weights() {
  Eigen::VectorXd w(kFrameDim);
  for (Eigen::Index k = 0; k < 3; ++k) {
    w[k * kStaticDim] = 1.0;
    w.segment(k * kStaticDim + 1, kMelCepOrder - 1).setConstant(1.0 / (kMelCepOrder - 1));
    w[k * kStaticDim + kLogF0] = 1.0;
    w[k * kStaticDim + kAperiodicity] = 1.0;
  }
  w[kVoicedness] = 1.0;
  return w * (static_cast<double>(kFrameDim) / w.sum());
}

struct AcousticTrainingConfig {
  RegressorTrainingConfig duration;
  RegressorTrainingConfig acoustic;
  bool mask_emotion = false;
};

struct AcousticTrainingResult {
  AcousticModel model;
  RegressorTrainingResult duration, acoustic;
};

struct AcousticTrainingData {
  std::vector<Eigen::MatrixXd> dur_x, dur_y, ac_x, ac_y;
};

// Reference-renderer targets for the episodes of the model's speaker.
inline AcousticTrainingData acoustic_training_data(const Corpus& corpus, const SpeakerId& speaker,
                                                   bool mask_emotion) {
  AcousticTrainingData d;
  for (const auto& ep : corpus.episodes) {
    if (ep.speaker.name != speaker.name) continue;
    const auto phones = flatten_episode(ep);
    const auto e = emotion_of(ep);
    const auto ref = reference_render(phones, e, speaker);
    const EmotionPoint in_e = mask_emotion ? EmotionPoint{} : e;
    d.dur_x.push_back(build_duration_features(phones, in_e));
    Eigen::MatrixXd logd(1, static_cast<Eigen::Index>(phones.size()));
    for (std::size_t n = 0; n < phones.size(); ++n)
      logd(0, static_cast<Eigen::Index>(n)) = std::log(static_cast<double>(ref.durations[n]));
    d.dur_y.push_back(std::move(logd));
    d.ac_x.push_back(build_acoustic_features(phones, in_e, ref.durations));
    d.ac_y.push_back(ref.track.frames);
  }
  if (d.dur_x.empty()) throw DomainError("corpus has no episodes for speaker " + speaker.name);
  return d;
}

inline AcousticTrainingResult train_acoustic(AcousticModel init, const Corpus& corpus,
                                             const AcousticTrainingConfig& cfg) {
  AcousticTrainingResult r{std::move(init), {}, {}};
  r.model.mask_emotion = cfg.mask_emotion;
  const auto data = acoustic_training_data(corpus, r.model.speaker, cfg.mask_emotion);
  auto dcfg = cfg.duration;
  dcfg.standardize_output = false;
  r.duration = train_regressor(r.model.duration_net, data.dur_x, data.dur_y, dcfg);
  auto acfg = cfg.acoustic;
  if (!acfg.loss_weights.size()) acfg.loss_weights = stream_weights();
  r.acoustic = train_regressor(r.model.acoustic_net, data.ac_x, data.ac_y, acfg);
  return r;
}

inline constexpr int kAcousticModelFormat = 1;

inline nlohmann::json to_json(const AcousticModel& m) {
  return {{"format_version", kAcousticModelFormat},
          {"type", "acoustic_model"},
          {"version", m.version},
          {"speaker", {{"name", m.speaker.name}, {"code", m.speaker.code}}},
          {"mask_emotion", m.mask_emotion},
          {"frame_shift_ms", kFrameShiftMs},
          {"duration_net", to_json(m.duration_net)},
          {"acoustic_net", to_json(m.acoustic_net)}};
}

inline AcousticModel acoustic_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kAcousticModelFormat || j.at("type") != "acoustic_model")
      throw ParseError("not an acoustic model file");
    AcousticModel m;
    m.speaker = {j.at("speaker").at("name").get<std::string>(), j.at("speaker").at("code").get<double>()};
    m.mask_emotion = j.at("mask_emotion").get<bool>();
    m.version = j.value("version", 1);
    m.duration_net = seq_regressor_from_json(j.at("duration_net"));
    m.acoustic_net = seq_regressor_from_json(j.at("acoustic_net"));
    if (m.duration_net.dims.input != kDurationDim || m.duration_net.dims.output != 1 ||
        m.acoustic_net.dims.input != kAcousticDim || m.acoustic_net.dims.output != kFrameDim)
      throw ParseError("acoustic model has unexpected network dimensions");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("acoustic model: ") + e.what());
  }
}

// Binary feature dump: "LGFT", uint32 dim, float32 frame shift in ms, then
// float32 frames, all little-endian.
inline constexpr char kFeatureMagic[4] = {'L', 'G', 'F', 'T'};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

inline std::uint32_t get_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + k])) << (8 * k);
  return v;
}

}  // namespace detail

inline std::string encode_feature_dump(const FeatureTrack& f) {
  std::string out(kFeatureMagic, 4);
  detail::put_u32(out, static_cast<std::uint32_t>(f.frames.rows()));
  detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(kFrameShiftMs)));
  for (Eigen::Index t = 0; t < f.size(); ++t)
    for (Eigen::Index d = 0; d < f.frames.rows(); ++d)
      detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(f.frames(d, t))));
  return out;
}

inline FeatureTrack decode_feature_dump(const std::string& s) {
  if (s.size() < 12 || s.compare(0, 4, kFeatureMagic, 4) != 0) throw ParseError("not a feature dump");
  const auto dim = detail::get_u32(s, 4);
  if (dim == 0 || (s.size() - 12) % (4ull * dim) != 0) throw ParseError("truncated feature dump");
  const auto T = static_cast<Eigen::Index>((s.size() - 12) / (4ull * dim));
  FeatureTrack f{Eigen::MatrixXd(dim, T)};
  std::size_t at = 12;
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index d = 0; d < dim; ++d, at += 4)
      f.frames(d, t) = std::bit_cast<float>(detail::get_u32(s, at));
  return f;
}

inline void write_feature_dump(const FeatureTrack& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const auto bytes = encode_feature_dump(f);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace laughgen
