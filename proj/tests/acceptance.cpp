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
// Acceptance suite: one PASS/FAIL line per criterion. With no arguments all
// criteria run; "--criterion N" runs one. Exit status is nonzero if any
// selected criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "laughgen/laughgen.hpp"
#include "test_util.hpp"

#ifndef LAUGHGEN_DATA_DIR
#error "LAUGHGEN_DATA_DIR must be defined"
#endif
#ifndef LAUGHGEN_CLI
#error "LAUGHGEN_CLI must be defined"
#endif

namespace lg = laughgen;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const lg::SpeakerId kMsy = lg::default_speakers()[0];
const lg::SpeakerId kFwa = lg::default_speakers()[1];

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  const auto m = lg::reference_length_model();
  const double a = lg::predict_lambda(m, kMsy, lg::scale_emotion(4, 4));
  const double b = lg::predict_lambda(m, kFwa, lg::scale_emotion(4, 4));
  const double c = lg::predict_lambda(m, kMsy, lg::scale_emotion(7, 7));
  o.detail << "lambda " << a << ", " << b << ", " << c << " ";
  o.check(std::abs(a - 4.1913) < 1e-3, "04_MSY(4,4)");
  o.check(std::abs(b - 2.5498) < 1e-3, "06_FWA(4,4)");
  o.check(std::abs(c - 15.029) < 1e-3, "04_MSY(7,7)");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 1.0, "runtime < 1 s");
}

void criterion2(Outcome& o) {
  const auto t0 = Clock::now();
  const double lambda = 4.1913;
  const lg::StoppingRule rule(lambda);
  lg::Rng rng(2);
  const int draws = 100000;
  std::map<long long, double> hist;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto n = lg::sample_length(rule, rng);
    hist[n] += 1.0 / draws;
    sum += static_cast<double>(n);
  }
  double tv = 0.0, mass = 0.0;
  for (long long n = 1; n <= 80; ++n) {
    const double ztp = lg::poisson_pmf(n, lambda) / (1.0 - std::exp(-lambda));
    mass += ztp;
    tv += std::abs(hist[n] - ztp);
  }
  for (const auto& [n, f] : hist)
    if (n > 80) tv += f;
  tv = 0.5 * (tv + (1.0 - mass));
  const double mean = sum / draws;
  o.detail << "TV " << tv << " mean " << mean << " ";
  o.check(tv < 0.01, "TV < 0.01");
  o.check(std::abs(mean - 4.2557) <= 0.05, "mean within 0.05 of 4.2557");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 5.0, "runtime < 5 s");
}

void criterion3(Outcome& o) {
  const auto t0 = Clock::now();
  lg::SynthSpec spec;
  spec.n_episodes = 2000;
  spec.seed = 1;
  const auto fit =
      lg::fit_length_model(lg::generate_synthetic_corpus(spec), {"x_ple", "x_ple:x_aro"});
  const double b1 = fit.speaker_baselines.at("04_MSY"), b2 = fit.speaker_baselines.at("06_FWA");
  const double cp = fit.coefficients.at("x_ple"), cpa = fit.coefficients.at("x_ple:x_aro");
  o.detail << "fit " << b1 << " " << b2 << " " << cp << " " << cpa << " ";
  o.check(std::abs(b1 - 1.433) <= 0.1 && std::abs(b2 - 0.936) <= 0.1 &&
              std::abs(cp - 0.527) <= 0.1 && std::abs(cpa - 0.750) <= 0.1,
          "coefficients within 0.1");
  const std::vector<std::string> want{"baseline:04_MSY", "baseline:06_FWA", "x_ple", "x_ple:x_aro"};
  int exact = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    exact += lg::select_length_model(lg::generate_synthetic_corpus(spec)).selected_terms == want;
  }
  o.detail << "stepwise exact " << exact << "/20 ";
  o.check(exact >= 18, "stepwise >= 18/20");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 10.0, "runtime < 10 s");
}

void criterion4(Outcome& o) {
  const auto t0 = Clock::now();
  lg::Corpus tiny;
  tiny.inventory = lg::PhoneInventory({"ha", "hu", "H", "hi", "%ha"});
  const char* seqs[] = {"ha ha H hu", "hu hu hu hu ha H", "ha"};
  for (int i = 0; i < 3; ++i) {
    lg::LaughterEpisode e;
    e.id = "t" + std::to_string(i);
    e.speaker = lg::default_speakers()[static_cast<std::size_t>(i % 2)];
    e.pleasantness = 2.0 + 2.0 * i;
    e.arousal = 6.5 - 2.0 * i;
    e.events = lg::group_events(lg::split_phones(seqs[i]));
    tiny.episodes.push_back(e);
  }
  auto pm = lg::init_params(tiny.inventory, 11, {6, 8});
  lg::Rng rng(12);
  lg::nn::fill_uniform(pm.params.out_b, 0.5, rng);
  const double phones_err = lg::gradient_check(pm, tiny, lg::reference_length_model()).max_error;

  double net_err[2];
  const lg::BiLstmDims dims[2] = {{lg::kDurationDim, 8, 3, 1}, {lg::kAcousticDim, 8, 3, lg::kFrameDim}};
  for (int k = 0; k < 2; ++k) {
    auto p = lg::init_bilstm(dims[k], rng);
    for (auto& b : p.blocks())
      if (b.name.ends_with(".b")) lg::nn::fill_uniform(*b.value, 0.5, rng);
    const Eigen::Index T = 6;
    Eigen::MatrixXd X(dims[k].input, T);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
    Eigen::MatrixXd Y = lg::bilstm_forward(p, X).y;
    for (Eigen::Index i = 0; i < Y.size(); ++i) Y.data()[i] += 0.01 * rng.normal();
    std::function<double(const lg::BiLstmParams&, lg::BiLstmParams*)> loss =
        [&](const lg::BiLstmParams& q, lg::BiLstmParams* g) { return lg::bilstm_sse(q, X, Y, g); };
    net_err[k] = lg::nn::gradient_check(p, loss).max_error;
  }
  o.detail << "max rel err phones " << phones_err << " duration " << net_err[0] << " acoustic "
           << net_err[1] << " ";
  o.check(phones_err < 1e-4, "phones generator");
  o.check(net_err[0] < 1e-4, "duration net");
  o.check(net_err[1] < 1e-4, "acoustic net");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 30.0, "runtime < 30 s");
}

void criterion5(Outcome& o) {
  const auto t0 = Clock::now();
  const auto c = lg::testing::toy_corpus();
  lg::TrainingConfig cfg;
  cfg.epochs = 2000;
  cfg.learning_rate = 1e-2;
  cfg.seed = 2;
  cfg.stop_at_accuracy = 0.99;
  const auto r = lg::train(lg::init_params(c.inventory, 2, {16, 32}), c, lg::reference_length_model(), cfg);
  o.detail << "accuracy " << r.final.accuracy << " after " << r.epochs_run << " epochs ";
  o.check(r.final.accuracy >= 0.99, "accuracy >= 0.99");
  o.check(r.epochs_run <= 2000, "within 2000 epochs");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 120.0, "runtime < 2 min");
}

void criterion6(Outcome& o) {
  lg::Rng rng(6);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<lg::PhoneToken> phones(1 + rng.below(12));
    for (auto& p : phones) p = lg::testing::random_phone(rng);
    const auto e = lg::scale_emotion(rng.uniform(1, 7), rng.uniform(1, 7));
    std::vector<int> durations;
    for (std::size_t i = 0; i < phones.size(); ++i) durations.push_back(1 + static_cast<int>(rng.below(40)));
    const auto D = lg::build_duration_features(phones, e);
    const auto A = lg::build_acoustic_features(phones, e, durations);
    long frames = 0;
    for (int d : durations) frames += d;
    o.check(D.rows() == 67 && D.cols() == static_cast<Eigen::Index>(phones.size()),
            "duration features 67 x N");
    o.check(A.rows() == 71 && A.cols() == frames, "acoustic features 71 x frames");
    o.check(D.allFinite() && A.allFinite(), "finite");
    ++checked;
  }
  o.detail << checked << " random inputs; dims " << lg::kDurationDim << "/" << lg::kAcousticDim;
}

void criterion7(Outcome& o) {
  const auto t0 = Clock::now();
  lg::Rng rng(7);
  double worst_dense = 0.0, worst_static = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index T = 10;
    Eigen::MatrixXd means(T, 3), prec(T, 3);
    for (Eigen::Index i = 0; i < means.size(); ++i) {
      means.data()[i] = rng.normal();
      prec.data()[i] = rng.uniform(0.1, 10.0);
    }
    const Eigen::MatrixXd W = lg::window_matrix(T);
    Eigen::VectorXd mu(3 * T), p(3 * T);
    for (Eigen::Index t = 0; t < T; ++t)
      for (int k = 0; k < 3; ++k) {
        mu[3 * t + k] = means(t, k);
        p[3 * t + k] = prec(t, k);
      }
    const Eigen::MatrixXd A = W.transpose() * p.asDiagonal() * W;
    const Eigen::VectorXd dense = A.ldlt().solve(W.transpose() * p.asDiagonal() * mu);
    worst_dense = std::max(worst_dense, (lg::mlpg_solve(means, prec) - dense).cwiseAbs().maxCoeff());

    Eigen::VectorXd c(T);
    for (auto& v : c) v = rng.normal();
    const Eigen::Vector3d var(rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.1, 3));
    worst_static = std::max(worst_static, (lg::mlpg_smooth(lg::apply_windows(c), var) - c).cwiseAbs().maxCoeff());
  }
  o.detail << "banded vs dense " << worst_dense << " consistent " << worst_static << " ";
  o.check(worst_dense <= 1e-8, "dense oracle 1e-8");
  o.check(worst_static <= 1e-9, "statics 1e-9");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 1.0, "runtime < 1 s");
}

std::uint32_t le(const std::string& b, std::size_t at, int n) {
  std::uint32_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
  return v;
}

void criterion8(Outcome& o) {
  const auto t0 = Clock::now();
  lg::FeatureTrack f{Eigen::MatrixXd::Zero(lg::kFrameDim, 200)};
  for (Eigen::Index t = 0; t < 200; ++t) {
    f.frames(0, t) = -2.0;
    f.frames(lg::kLogF0, t) = std::log(120.0);
    f.frames(lg::kVoicedness, t) = 1.0;
  }
  const auto w = lg::synthesize(f, {}, 8);
  const auto& x = w.samples;
  const double fs = 16000.0;
  const int lo = static_cast<int>(fs / 400), hi = static_cast<int>(fs / 60);
  std::vector<double> r(static_cast<std::size_t>(hi + 2), 0.0);
  for (int lag = lo - 1; lag <= hi + 1; ++lag)
    for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < x.size(); ++i)
      r[static_cast<std::size_t>(lag)] += x[i] * x[i + static_cast<std::size_t>(lag)];
  int best = lo;
  for (int lag = lo; lag <= hi; ++lag)
    if (r[static_cast<std::size_t>(lag)] > r[static_cast<std::size_t>(best)]) best = lag;
  const double a = r[static_cast<std::size_t>(best - 1)], b = r[static_cast<std::size_t>(best)],
               c = r[static_cast<std::size_t>(best + 1)];
  const double f0 = fs / (best + 0.5 * (a - c) / (a - 2 * b + c));
  o.detail << "f0 " << f0 << " Hz ";
  o.check(std::abs(f0 - 120.0) <= 3.0, "f0 within 3 Hz");

  const auto bytes = lg::encode_wav(w);
  o.check(bytes == lg::encode_wav(lg::synthesize(f, {}, 8)), "byte-identical WAV");
  const std::uint32_t data = static_cast<std::uint32_t>(2 * x.size());
  o.check(bytes.size() == 44 + data, "size");
  o.check(bytes.substr(0, 4) == "RIFF" && le(bytes, 4, 4) == 36 + data &&
              bytes.substr(8, 8) == "WAVEfmt " && le(bytes, 16, 4) == 16 && le(bytes, 20, 2) == 1 &&
              le(bytes, 22, 2) == 1 && le(bytes, 24, 4) == 16000 && le(bytes, 28, 4) == 32000 &&
              le(bytes, 32, 2) == 2 && le(bytes, 34, 2) == 16 && bytes.substr(36, 4) == "data" &&
              le(bytes, 40, 4) == data,
          "header fields");
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 5.0, "runtime < 5 s");
}

constexpr std::size_t kC9AcousticEpisodes = 80;
constexpr Eigen::Index kC9AcousticHidden = 16;
constexpr int kC9AcousticEpochs = 150;

void criterion9(Outcome& o) {
  const auto t0 = Clock::now();
  lg::SynthSpec phones_spec;
  phones_spec.n_episodes = 600;
  phones_spec.seed = 1;
  lg::SynthSpec acoustic_spec;
  acoustic_spec.n_episodes = kC9AcousticEpisodes;
  acoustic_spec.seed = 2;
  acoustic_spec.speakers = {kMsy};
  lg::AblationTrainingConfig cfg;
  cfg.phones_dims = {16, 32};
  cfg.phones.epochs = 60;
  cfg.phones.learning_rate = 3e-3;
  cfg.acoustic_hidden = kC9AcousticHidden;
  cfg.acoustic_layers = 3;
  for (auto* rc : {&cfg.acoustic.duration, &cfg.acoustic.acoustic}) {
    rc->epochs = kC9AcousticEpochs;
    rc->learning_rate = 5e-3;
  }
  const auto models = lg::train_ablation_models(lg::generate_synthetic_corpus(phones_spec),
                                                lg::generate_synthetic_corpus(acoustic_spec), cfg);
  lg::GridConfig grid;
  grid.seed = 1;
  const auto set = lg::run_ablation_grid(models, grid);
  const auto rep = lg::analyze_ablation(set, lg::proxy_perception(set));
  const auto& pp = rep.correlation({1, 1});
  const auto& mm = rep.correlation({0, 0});
  const auto& w = rep.comparisons.at(0);
  o.detail << "r(++) ple " << pp.r_ple << " aro " << pp.r_aro << "; r(--) ple " << mm.r_ple << " aro "
           << mm.r_aro << "; Williams t ple " << w.ple.statistic << " aro " << w.aro.statistic << " ";
  o.check(pp.r_ple >= 0.8 && pp.r_aro >= 0.8, "r(++) >= 0.8");
  o.check(pp.r_ple > mm.r_ple && pp.r_aro > mm.r_aro, "r(++) > r(--)");
  o.check(w.ple.statistic > 0 && w.aro.statistic > 0, "Williams t > 0");
  o.detail << "time " << seconds_since(t0) << "s";
}

void criterion10(Outcome& o) {
  const auto t0 = Clock::now();
  for (auto d : {lg::ResponseDimension::kPleasantness, lg::ResponseDimension::kArousal}) {
    const auto truth = lg::reference_response_truth(d);
    const auto m = lg::fit_response_model(lg::synthetic_responses(lg::grid_layout(d), truth, 0.1, 1), d);
    std::set<std::string> want, got(m.terms.begin(), m.terms.end());
    for (const auto& [t, b] : truth) want.insert(t);
    const auto name = lg::dimension_name(d);
    o.check(got == want, name + " term set");
    double worst = 0.0;
    for (const auto& [t, b] : truth) worst = std::max(worst, std::abs(m.coefficient(t) - b));
    o.detail << name << " max coef err " << worst << " ";
    o.check(worst <= 0.05, name + " coefficients within 0.05");
    o.check(m.has("d_phones:x") && m.has("d_acoust:x") && m.has("d_phones:d_acoust:x"),
            name + " interaction terms");
    if (d == lg::ResponseDimension::kArousal) o.check(!m.has("1"), "aro without intercept");
  }
  const double s = seconds_since(t0);
  o.detail << "time " << s << "s";
  o.check(s < 5.0, "runtime < 5 s");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& cmd) { return std::system(cmd.c_str()); }

void criterion11(Outcome& o) {
  const auto t0 = Clock::now();
  const std::string cli = LAUGHGEN_CLI;
  const auto root = std::filesystem::temp_directory_path() / "laughgen_acceptance_11";
  std::filesystem::remove_all(root);
  for (int pass = 0; pass < 2; ++pass) {
    const auto dir = root / std::to_string(pass);
    std::filesystem::create_directories(dir);
    const auto phones = (dir / "phones.txt").string();
    o.check(run(cli + " generate --speaker 04_MSY --ple 7 --aro 7 --n 10 --seed 11 --out " + phones) == 0,
            "generate exit 0");
    o.check(run(cli + " synth --phones-file " + phones + " --speaker 04_MSY --ple 7 --aro 7 --seed 11 --out-dir " +
                (dir / "wav").string()) == 0,
            "synth exit 0");
  }
  const auto a = root / "0", b = root / "1";
  o.check(slurp(a / "phones.txt") == slurp(b / "phones.txt"), "identical phone lists");
  int lines = 0;
  for (char ch : slurp(a / "phones.txt")) lines += ch == '\n';
  o.check(lines == 10, "10 sequences");
  int wavs = 0;
  for (int i = 0; i < 10; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%03d.wav", i);
    const auto x = slurp(a / "wav" / name);
    o.check(!x.empty() && x == slurp(b / "wav" / name), std::string("identical ") + name);
    wavs += !x.empty();
  }
  o.detail << wavs << " WAVs compared; ";
  const lg::PhonesModel m =
      lg::phones_model_from_json(nlohmann::json::parse(slurp(std::string(LAUGHGEN_DATA_DIR) + "/default_phones.json")));
  double mean[2];
  const int raw[2] = {4, 7};
  for (int k = 0; k < 2; ++k) {
    lg::GenerationRequest req{kMsy, static_cast<double>(raw[k]), static_cast<double>(raw[k]), 1000, 110 + static_cast<std::uint64_t>(k)};
    double total = 0.0;
    for (const auto& s : lg::generate(m, req)) total += static_cast<double>(s.size());
    mean[k] = total / 1000.0;
  }
  o.detail << "mean length (4,4) " << mean[0] << " (7,7) " << mean[1] << " ";
  o.check(mean[1] > mean[0], "(7,7) longer than (4,4)");
  o.detail << "time " << seconds_since(t0) << "s";
}

void criterion12(Outcome& o) {
  const auto c = lg::load_annotation(std::string(LAUGHGEN_DATA_DIR) + "/fixture_corpus.json");
  const auto text = lg::serialize_annotation(c);
  const auto again = lg::parse_annotation(text);
  o.check(again == c, "parse(serialize(c)) == c");
  o.check(lg::serialize_annotation(again) == text, "serialize idempotent");
  bool found = false;
  for (const auto& e : c.episodes)
    found = found || lg::join_phones(lg::flatten_episode(e)) == "H hu hu H hu H H H %hu %hu %hu H";
  o.check(found, "episode flattening");
  o.detail << c.episodes.size() << " episodes round-tripped";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, void (*)(Outcome&)>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3},   {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7},   {8, criterion8},
      {9, criterion9}, {10, criterion10}, {11, criterion11}, {12, criterion12}};
  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
  else if (argc != 1) {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 2;
  }
  bool all_pass = true;
  for (const auto& [id, fn] : criteria) {
    if (only && id != only) continue;
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str()
              << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
