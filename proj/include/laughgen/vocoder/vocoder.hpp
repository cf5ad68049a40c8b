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
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "laughgen/acoustic/features.hpp"
#include "laughgen/acoustic/reference.hpp"
#include "laughgen/core/error.hpp"
#include "laughgen/core/rng.hpp"

namespace laughgen {

struct VocoderConfig {
  int sample_rate = 16000;
  int frame_shift = 80;
  int fft_size = 1024;
  double warp_alpha = kWarpAlpha;

  void validate() const {
    if (sample_rate <= 0 || frame_shift <= 0 || fft_size <= 0)
      throw DomainError("vocoder sizes must be positive");
    if ((fft_size & (fft_size - 1)) != 0) throw DomainError("fft_size must be a power of two");
    if (2 * frame_shift >= fft_size) throw DomainError("frame_shift must be below fft_size / 2");
    if (!(std::abs(warp_alpha) < 1.0)) throw DomainError("warp alpha must lie in (-1, 1)");
  }
};

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::size_t clipped = 0;  // samples beyond +-1 before normalisation
};

// cos(m beta(w_k)) for the fft_size / 2 + 1 bins and m < order.
inline Eigen::MatrixXd melcep_basis(const VocoderConfig& cfg, Eigen::Index order) {
  const int bins = cfg.fft_size / 2 + 1;
  Eigen::MatrixXd B(bins, order);
  for (int k = 0; k < bins; ++k) {
    const double beta = warp_frequency(2.0 * std::numbers::pi * k / cfg.fft_size, cfg.warp_alpha);
    for (Eigen::Index m = 0; m < order; ++m) B(k, m) = std::cos(static_cast<double>(m) * beta);
  }
  return B;
}

// |H(w_k)| = exp(sum_m c_m cos(m beta(w_k))) on fft_size / 2 + 1 bins.
inline Eigen::VectorXd melcep_to_spectrum(const Eigen::VectorXd& c, const Eigen::MatrixXd& basis) {
  if (!c.allFinite()) throw DomainError("mel-cepstrum must be finite");
  return (basis * c).array().exp();
}

inline Eigen::VectorXd melcep_to_spectrum(const Eigen::VectorXd& c, const VocoderConfig& cfg) {
  return melcep_to_spectrum(c, melcep_basis(cfg, c.size()));
}

// Pulse train where voicedness >= 0.5, mixed with noise by aperiodicity;
// unit-variance noise elsewhere. Pulses carry sqrt(period) so the train has
// unit power.
inline std::vector<double> build_excitation(const FeatureTrack& f, const VocoderConfig& cfg, Rng& rng) {
  if (f.size() == 0) throw DomainError("cannot build excitation for zero frames");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(f.size()) * cfg.frame_shift);
  double phase = 0.0;
  bool was_voiced = false;
  for (Eigen::Index t = 0; t < f.size(); ++t) {
    const bool voiced = f.voicedness(t) >= 0.5;
    double period = 0.0, ap = 1.0;
    if (voiced) {
      const double f0 = std::exp(f.log_f0(t));
      if (!std::isfinite(f0) || f0 <= 0.0) throw NumericError("non-finite f0 on a voiced frame");
      period = cfg.sample_rate / f0;
      ap = std::clamp(f.aperiodicity(t), 0.0, 1.0);
      if (!was_voiced) phase = period;
    }
    was_voiced = voiced;
    for (int n = 0; n < cfg.frame_shift; ++n) {
      const double noise = rng.normal();
      if (!voiced) {
        out.push_back(noise);
        continue;
      }
      double pulse = 0.0;
      if (phase >= period) {
        pulse = std::sqrt(period);
        phase -= period;
      }
      phase += 1.0;
      out.push_back(std::sqrt(1.0 - ap) * pulse + std::sqrt(ap) * noise);
    }
  }
  return out;
}

// Zero-phase envelope filtering of Hann-windowed excitation chunks
// (length 2 * frame_shift, hop frame_shift) with overlap-add.
inline Waveform synthesize(const FeatureTrack& f, const VocoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const auto exc = build_excitation(f, cfg, rng);
  const int hop = cfg.frame_shift, L = 2 * hop, N = cfg.fft_size;
  const auto total = static_cast<long>(exc.size());
  const int offset = N / 2 - hop;  // chunk position inside the FFT buffer
  std::vector<double> acc(static_cast<std::size_t>(total + 2 * N), 0.0);
  const long base = N;             // acc index of output sample 0
  Eigen::FFT<double> fft;
  std::vector<double> buf(static_cast<std::size_t>(N));
  std::vector<std::complex<double>> spec;
  std::vector<double> window(static_cast<std::size_t>(L));
  const Eigen::MatrixXd basis = melcep_basis(cfg, kMelCepOrder);
  for (int n = 0; n < L; ++n) window[static_cast<std::size_t>(n)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / L);

  for (Eigen::Index t = -1; t <= f.size(); ++t) {
    const long start = static_cast<long>(t) * hop - hop / 2;
    std::fill(buf.begin(), buf.end(), 0.0);
    bool any = false;
    for (int n = 0; n < L; ++n) {
      const long i = start + n;
      if (i < 0 || i >= total) continue;
      buf[static_cast<std::size_t>(offset + n)] = window[static_cast<std::size_t>(n)] * exc[static_cast<std::size_t>(i)];
      any = true;
    }
    if (!any) continue;
    const auto env = melcep_to_spectrum(f.mel_cepstrum(std::clamp<Eigen::Index>(t, 0, f.size() - 1)), basis);
    fft.fwd(spec, buf);
    for (int k = 0; k < N; ++k) spec[static_cast<std::size_t>(k)] *= env[std::min(k, N - k)];
    fft.inv(buf, spec);
    for (int n = 0; n < N; ++n) acc[static_cast<std::size_t>(base + start - offset + n)] += buf[static_cast<std::size_t>(n)];
  }

  Waveform w;
  w.sample_rate = cfg.sample_rate;
  w.samples.assign(acc.begin() + base, acc.begin() + base + total);
  double peak = 0.0;
  for (double x : w.samples) {
    if (!std::isfinite(x)) throw NumericError("synthesis produced a non-finite sample");
    peak = std::max(peak, std::abs(x));
    w.clipped += std::abs(x) > 1.0;
  }
  if (peak > 1.0)
    for (double& x : w.samples) x *= 0.9 / peak;
  return w;
}

namespace detail {

inline void put_le(std::string& out, std::uint32_t v, int bytes) {
  for (int k = 0; k < bytes; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

}  // namespace detail

inline std::int16_t quantize_sample(double x) {
  return static_cast<std::int16_t>(std::lround(std::clamp(x, -1.0, 1.0) * 32767.0));
}

// RIFF/WAVE, PCM 16-bit little-endian, mono.
inline std::string encode_wav(const Waveform& w) {
  const auto data_bytes = static_cast<std::uint32_t>(2 * w.samples.size());
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_le(out, 36 + data_bytes, 4);
  out += "WAVEfmt ";
  detail::put_le(out, 16, 4);
  detail::put_le(out, 1, 2);  // PCM
  detail::put_le(out, 1, 2);  // mono
  detail::put_le(out, static_cast<std::uint32_t>(w.sample_rate), 4);
  detail::put_le(out, static_cast<std::uint32_t>(w.sample_rate) * 2, 4);
  detail::put_le(out, 2, 2);
  detail::put_le(out, 16, 2);
  out += "data";
  detail::put_le(out, data_bytes, 4);
  for (double x : w.samples) detail::put_le(out, static_cast<std::uint16_t>(quantize_sample(x)), 2);
  return out;
}

inline void write_wav(const Waveform& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const auto bytes = encode_wav(w);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace laughgen
