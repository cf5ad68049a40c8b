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
#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "laughgen/acoustic/reference.hpp"
#include "laughgen/vocoder/vocoder.hpp"
#include "test_util.hpp"

namespace laughgen {
namespace {

FeatureTrack constant_track(Eigen::Index T, double f0, bool voiced, double ap, double c0 = 0.0) {
  FeatureTrack f{Eigen::MatrixXd::Zero(kFrameDim, T)};
  for (Eigen::Index t = 0; t < T; ++t) {
    f.frames(0, t) = c0;
    f.frames(kLogF0, t) = std::log(f0);
    f.frames(kAperiodicity, t) = ap;
    f.frames(kVoicedness, t) = voiced ? 1.0 : 0.0;
  }
  return f;
}

double rms(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

double zero_crossing_rate(const std::vector<double>& x) {
  double z = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) z += (x[i - 1] < 0) != (x[i] < 0);
  return z / static_cast<double>(x.size() - 1);
}

// Autocorrelation peak between 60 and 400 Hz with parabolic refinement.
double estimate_f0(const std::vector<double>& x, double fs) {
  const int lo = static_cast<int>(fs / 400), hi = static_cast<int>(fs / 60);
  std::vector<double> r(static_cast<std::size_t>(hi + 2), 0.0);
  for (int lag = lo - 1; lag <= hi + 1; ++lag)
    for (std::size_t i = 0; i + lag < x.size(); ++i) r[static_cast<std::size_t>(lag)] += x[i] * x[i + lag];
  int best = lo;
  for (int lag = lo; lag <= hi; ++lag)
    if (r[static_cast<std::size_t>(lag)] > r[static_cast<std::size_t>(best)]) best = lag;
  const double a = r[best - 1], b = r[best], c = r[best + 1];
  const double shift = 0.5 * (a - c) / (a - 2 * b + c);
  return fs / (best + shift);
}

TEST(MelcepSpectrum, Examples) {
  const VocoderConfig cfg;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(60);
  auto s = melcep_to_spectrum(c, cfg);
  ASSERT_EQ(s.size(), 513);
  EXPECT_LT((s.array() - 1.0).abs().maxCoeff(), 1e-15);
  c[0] = 1.0;
  s = melcep_to_spectrum(c, cfg);
  EXPECT_LT((s.array() - std::exp(1.0)).abs().maxCoeff(), 1e-12);
  EXPECT_NEAR(std::exp(1.0), 2.71828, 1e-5);
  VocoderConfig unwarped;
  unwarped.warp_alpha = 0.0;
  c.setZero();
  c[1] = 1.0;
  s = melcep_to_spectrum(c, unwarped);
  for (int k = 0; k < 513; ++k) EXPECT_NEAR(std::log(s[k]), std::cos(2.0 * std::numbers::pi * k / 1024), 1e-12);
  Rng rng(1);
  for (auto& v : c) v = rng.normal();
  EXPECT_GT(melcep_to_spectrum(c, cfg).minCoeff(), 0.0);
  c[3] = std::nan("");
  EXPECT_THROW(melcep_to_spectrum(c, cfg), DomainError);
}

TEST(Excitation, PulseSpacing) {
  Rng rng(2);
  const auto e = build_excitation(constant_track(200, 100.0, true, 0.0), {}, rng);
  ASSERT_EQ(e.size(), 16000u);
  std::vector<std::size_t> pulses;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] != 0.0) pulses.push_back(i);
  ASSERT_EQ(pulses.size(), 100u);
  for (std::size_t k = 0; k < pulses.size(); ++k) EXPECT_EQ(pulses[k], 160 * k);
  EXPECT_DOUBLE_EQ(e[0], std::sqrt(160.0));
}

TEST(Excitation, UnvoicedIsNoise) {
  Rng rng(3);
  const auto e = build_excitation(constant_track(200, 100.0, false, 0.0), {}, rng);
  double mean = 0.0;
  for (double v : e) mean += v / 16000.0;
  EXPECT_LT(std::abs(mean), 0.01);
  EXPECT_NEAR(rms(e), 1.0, 0.03);
}

TEST(Excitation, Errors) {
  Rng rng(4);
  EXPECT_THROW(build_excitation(FeatureTrack{Eigen::MatrixXd(kFrameDim, 0)}, {}, rng), DomainError);
  auto bad = constant_track(3, 100.0, true, 0.0);
  bad.frames(kLogF0, 1) = std::nan("");
  EXPECT_THROW(build_excitation(bad, {}, rng), NumericError);
  bad.frames(kVoicedness, 1) = 0.0;
  EXPECT_NO_THROW(build_excitation(bad, {}, rng));
}

TEST(Synthesize, LengthAndSilence) {
  const auto w = synthesize(constant_track(37, 150.0, true, 0.2, -30.0), {}, 1);
  ASSERT_EQ(w.samples.size(), 37u * 80u);
  EXPECT_LT(rms(w.samples), 1e-3);
}

TEST(Synthesize, ConstantF0Recovered) {
  const auto w = synthesize(constant_track(200, 120.0, true, 0.0, -2.0), {}, 5);
  EXPECT_NEAR(estimate_f0(w.samples, 16000.0), 120.0, 3.0);
}

TEST(Synthesize, UnvoicedHasMoreZeroCrossings) {
  auto voiced = constant_track(100, 120.0, true, 0.0, -2.0);
  auto unvoiced = constant_track(100, 120.0, false, 0.0, -2.0);
  // A flat envelope leaves bare pulses whose gaps hold only FFT round-off.
  voiced.frames.row(1).setConstant(1.0);
  unvoiced.frames.row(1).setConstant(1.0);
  const auto v = synthesize(voiced, {}, 6);
  const auto u = synthesize(unvoiced, {}, 6);
  EXPECT_GT(zero_crossing_rate(u.samples), zero_crossing_rate(v.samples));
}

TEST(Synthesize, GainFollowsC0) {
  for (bool voiced : {true, false}) {
    const auto a = synthesize(constant_track(100, 130.0, voiced, 0.3, -5.0), {}, 7);
    const auto b = synthesize(constant_track(100, 130.0, voiced, 0.3, -4.0), {}, 7);
    ASSERT_EQ(a.clipped + b.clipped, 0u);
    EXPECT_NEAR(rms(b.samples) / rms(a.samples), std::exp(1.0), 0.05 * std::exp(1.0));
  }
}

TEST(Synthesize, NormalisesLoudOutput) {
  const auto w = synthesize(constant_track(50, 200.0, true, 0.1, 3.0), {}, 8);
  EXPECT_GT(w.clipped, 0u);
  double peak = 0.0;
  for (double x : w.samples) {
    ASSERT_TRUE(std::isfinite(x));
    peak = std::max(peak, std::abs(x));
  }
  EXPECT_LE(peak, 0.9 + 1e-12);
}

TEST(Synthesize, ReferenceRenderIsFiniteAndDeterministic) {
  const auto r = reference_render(split_phones("H ha ha %hu ~ho"), {0.7, 0.7}, default_speakers()[0]);
  const auto a = synthesize(r.track, {}, 11), b = synthesize(r.track, {}, 11);
  EXPECT_EQ(encode_wav(a), encode_wav(b));
  EXPECT_NE(encode_wav(a), encode_wav(synthesize(r.track, {}, 12)));
  EXPECT_EQ(a.samples.size(), static_cast<std::size_t>(r.track.size()) * 80u);
  EXPECT_GT(rms(a.samples), 1e-3);
}

TEST(VocoderConfig, Validation) {
  VocoderConfig c;
  c.fft_size = 1000;
  EXPECT_THROW(c.validate(), DomainError);
  c.fft_size = 128;
  c.frame_shift = 80;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Wav, HeaderFields) {
  Waveform w;
  w.samples.assign(16000, 0.25);
  const auto b = encode_wav(w);
  ASSERT_EQ(b.size(), 44u + 32000u);
  EXPECT_EQ(b.substr(0, 4), "RIFF");
  EXPECT_EQ(testing::read_le(b, 4, 4), 36u + 32000u);
  EXPECT_EQ(b.substr(8, 8), "WAVEfmt ");
  EXPECT_EQ(testing::read_le(b, 16, 4), 16u);
  EXPECT_EQ(testing::read_le(b, 20, 2), 1u);
  EXPECT_EQ(testing::read_le(b, 22, 2), 1u);
  EXPECT_EQ(testing::read_le(b, 24, 4), 16000u);
  EXPECT_EQ(testing::read_le(b, 28, 4), 32000u);
  EXPECT_EQ(testing::read_le(b, 32, 2), 2u);
  EXPECT_EQ(testing::read_le(b, 34, 2), 16u);
  EXPECT_EQ(b.substr(36, 4), "data");
  EXPECT_EQ(testing::read_le(b, 40, 4), 32000u);
}

TEST(Wav, EmptyWaveform) {
  const auto b = encode_wav(Waveform{});
  ASSERT_EQ(b.size(), 44u);
  EXPECT_EQ(testing::read_le(b, 4, 4), 36u);
  EXPECT_EQ(testing::read_le(b, 40, 4), 0u);
}

TEST(Wav, FileRoundTripWithinOneLsb) {
  Waveform w;
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) w.samples.push_back(rng.uniform(-1.2, 1.2));
  const auto path = (std::filesystem::temp_directory_path() / "laughgen_wav_test.wav").string();
  write_wav(w, path);
  const auto back = testing::decode_wav(testing::read_file(path));
  std::filesystem::remove(path);
  EXPECT_EQ(back.format, 1);
  EXPECT_EQ(back.channels, 1);
  EXPECT_EQ(back.bits, 16);
  EXPECT_EQ(back.sample_rate, 16000u);
  ASSERT_EQ(back.samples.size(), 1000u);
  for (std::size_t i = 0; i < 1000; ++i)
    EXPECT_LE(std::abs(back.samples[i] / 32767.0 - std::clamp(w.samples[i], -1.0, 1.0)), 1.0 / 32767.0);
  EXPECT_THROW(write_wav(w, "/nonexistent-dir/x.wav"), IoError);
}

}  // namespace
}  // namespace laughgen
