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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laughgen/laughgen.hpp"

#ifndef LAUGHGEN_DATA_DIR
#define LAUGHGEN_DATA_DIR "data"
#endif

namespace lg = laughgen;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;
const std::string kDataDir = LAUGHGEN_DATA_DIR;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lg::IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lg::IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw lg::IoError("write failed for '" + path + "'");
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw lg::ParseError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(1) + "\n"); }

lg::SpeakerId speaker_named(const std::string& name) {
  for (const auto& s : lg::default_speakers())
    if (s.name == name) return s;
  throw lg::DomainError("unknown speaker '" + name + "'");
}

// Generating commands run on --seed, or on the default which is then
// reported on stderr.
struct SeedOption {
  std::uint64_t value = kDefaultSeed;
  CLI::Option* opt = nullptr;

  void add(CLI::App* app) { opt = app->add_option("--seed", value, "Master random seed"); }
  std::uint64_t get() const {
    if (!opt->count()) std::cerr << "seed: " << value << " (default)\n";
    return value;
  }
};

lg::PhonesModel load_phones(const std::string& path) {
  return lg::phones_model_from_json(read_json(path));
}

lg::AcousticModel load_acoustic(const std::string& path) {
  return lg::acoustic_model_from_json(read_json(path));
}

std::vector<std::vector<lg::PhoneToken>> read_phone_lines(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<lg::PhoneToken>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(lg::split_phones(line));
  }
  if (out.empty()) throw lg::DomainError("no phone sequences in '" + path + "'");
  return out;
}

lg::FeatureTrack render_track(const std::vector<lg::PhoneToken>& phones, const lg::EmotionPoint& e,
                              const lg::SpeakerId& speaker, const std::string& backend,
                              const std::string& acoustic_path) {
  if (backend == "reference") return lg::reference_render(phones, e, speaker).track;
  return lg::render_features(load_acoustic(acoustic_path), phones, e).track;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-controllable laughter synthesis toolkit"};
  app.require_subcommand(1);

  // corpus-stats
  auto* stats = app.add_subcommand("corpus-stats", "Summary statistics of an annotation file");
  std::string stats_file;
  bool stats_text = false;
  stats->add_option("file", stats_file, "Annotation JSON")->required();
  auto* jflag = stats->add_flag("--json", "JSON output (default)");
  stats->add_flag("--text", stats_text, "Plain-text output")->excludes(jflag);

  // corpus-synth
  auto* synth_corpus = app.add_subcommand("corpus-synth", "Sample a synthetic annotated corpus");
  std::size_t n_episodes = 500;
  std::string corpus_out = "-";
  SeedOption corpus_seed;
  synth_corpus->add_option("--n", n_episodes, "Number of episodes")->capture_default_str();
  synth_corpus->add_option("--out", corpus_out, "Output file ('-' for stdout)")->capture_default_str();
  corpus_seed.add(synth_corpus);

  // fit-length
  auto* fit = app.add_subcommand("fit-length", "Fit the Poisson length model");
  std::string fit_corpus, fit_out = "-";
  bool fit_baseline = false;
  fit->add_option("--corpus", fit_corpus, "Annotation JSON")->required();
  fit->add_option("--out", fit_out, "Model file ('-' for stdout)")->capture_default_str();
  fit->add_flag("--baselines-only", fit_baseline, "Speaker baselines only, no emotion terms");

  // train-phones
  auto* tp = app.add_subcommand("train-phones", "Train the phones generator");
  std::string tp_corpus, tp_length, tp_out;
  lg::TrainingConfig tp_cfg;
  lg::PhonesDims tp_dims;
  SeedOption tp_seed;
  tp->add_option("--corpus", tp_corpus, "Annotation JSON")->required();
  tp->add_option("--length-model", tp_length, "Length model JSON (fitted from the corpus if absent)");
  tp->add_option("--out", tp_out, "Model file")->required();
  tp->add_option("--epochs", tp_cfg.epochs)->capture_default_str();
  tp->add_option("--lr", tp_cfg.learning_rate)->capture_default_str();
  tp->add_option("--batch", tp_cfg.batch_size)->capture_default_str();
  tp->add_option("--embed", tp_dims.embed)->capture_default_str();
  tp->add_option("--hidden", tp_dims.hidden)->capture_default_str();
  tp->add_flag("--mask-emotion", tp_cfg.mask_emotion, "Train without emotion inputs");
  tp_seed.add(tp);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample phone sequences");
  lg::GenerationRequest req;
  std::string gen_speaker = "04_MSY", gen_model = kDataDir + "/default_phones.json", gen_out = "-";
  SeedOption gen_seed;
  gen->add_option("--model", gen_model, "Phones model JSON")->capture_default_str();
  gen->add_option("--speaker", gen_speaker)->capture_default_str();
  gen->add_option("--ple", req.ple_raw, "Target pleasantness 1..7")->capture_default_str();
  gen->add_option("--aro", req.aro_raw, "Target arousal 1..7")->capture_default_str();
  gen->add_option("--n", req.n_draws, "Number of sequences")->capture_default_str();
  gen->add_option("--temperature", req.temperature)->capture_default_str();
  gen->add_flag("--mask-emotion", req.mask_emotion, "Feed neutral emotion");
  gen->add_option("--out", gen_out, "Output file ('-' for stdout)")->capture_default_str();
  gen_seed.add(gen);

  // train-acoustic
  auto* ta = app.add_subcommand("train-acoustic", "Train duration and acoustic networks");
  std::string ta_corpus, ta_out, ta_speaker = "04_MSY";
  lg::AcousticTrainingConfig ta_cfg;
  Eigen::Index ta_hidden = 128;
  int ta_layers = 3, ta_epochs = 100;
  double ta_lr = 1e-3;
  SeedOption ta_seed;
  ta->add_option("--corpus", ta_corpus, "Annotation JSON")->required();
  ta->add_option("--out", ta_out, "Model file")->required();
  ta->add_option("--speaker", ta_speaker)->capture_default_str();
  ta->add_option("--hidden", ta_hidden)->capture_default_str();
  ta->add_option("--layers", ta_layers)->capture_default_str();
  ta->add_option("--epochs", ta_epochs)->capture_default_str();
  ta->add_option("--lr", ta_lr)->capture_default_str();
  ta->add_flag("--mask-emotion", ta_cfg.mask_emotion, "Train without emotion inputs");
  ta_seed.add(ta);

  // render-features / synth share their input options.
  struct RenderOptions {
    std::string phones, phones_file, speaker = "04_MSY", backend = "model";
    std::string acoustic = kDataDir + "/default_acoustic.json";
    double ple = 4.0, aro = 4.0;
  };
  auto add_render = [](CLI::App* sub, RenderOptions& o) {
    auto* p = sub->add_option("--phones", o.phones, "Space-separated phones");
    auto* f = sub->add_option("--phones-file", o.phones_file, "One phone sequence per line");
    p->excludes(f);
    sub->add_option("--speaker", o.speaker)->capture_default_str();
    sub->add_option("--ple", o.ple)->capture_default_str();
    sub->add_option("--aro", o.aro)->capture_default_str();
    sub->add_option("--backend", o.backend)
        ->check(CLI::IsMember({"model", "reference"}))
        ->capture_default_str();
    sub->add_option("--acoustic-model", o.acoustic)->capture_default_str();
  };

  auto* rf = app.add_subcommand("render-features", "Write a binary feature dump");
  RenderOptions rf_opt;
  std::string rf_out;
  add_render(rf, rf_opt);
  rf->add_option("--out", rf_out, "Feature dump file")->required();

  auto* sy = app.add_subcommand("synth", "Synthesize laughter to WAV");
  RenderOptions sy_opt;
  std::string sy_out, sy_dir;
  SeedOption sy_seed;
  add_render(sy, sy_opt);
  auto* sy_o = sy->add_option("--out", sy_out, "WAV file (with --phones)");
  sy->add_option("--out-dir", sy_dir, "Directory for one WAV per line (with --phones-file)")
      ->excludes(sy_o);
  sy_seed.add(sy);

  // experiment run / analyze
  auto* ex = app.add_subcommand("experiment", "Ablation experiment");
  ex->require_subcommand(1);
  auto* ex_run = ex->add_subcommand("run", "Generate the stimulus grid");
  std::string ex_pm, ex_pp, ex_am, ex_ap, ex_out = "-", ex_wavs;
  lg::GridConfig grid;
  std::string ex_speaker = "04_MSY";
  SeedOption ex_seed;
  ex_run->add_option("--phones-masked", ex_pm, "Phones model trained without emotion")->required();
  ex_run->add_option("--phones", ex_pp, "Phones model trained with emotion")->required();
  ex_run->add_option("--acoustic-masked", ex_am, "Acoustic model trained without emotion")->required();
  ex_run->add_option("--acoustic", ex_ap, "Acoustic model trained with emotion")->required();
  ex_run->add_option("--speaker", ex_speaker)->capture_default_str();
  ex_run->add_option("--sequences", grid.sequences_per_cell)->capture_default_str();
  ex_run->add_option("--flagged", grid.flagged_per_cell)->capture_default_str();
  ex_run->add_option("--wav-dir", ex_wavs, "Write one WAV per stimulus here");
  ex_run->add_option("--out", ex_out, "Stimulus set JSON ('-' for stdout)")->capture_default_str();
  ex_seed.add(ex_run);
  auto* ex_an = ex->add_subcommand("analyze", "Correlations, Williams' t and response models");
  std::string an_stimuli, an_ratings, an_out = "-";
  lg::ScreeningConfig screening;
  ex_an->add_option("--stimuli", an_stimuli, "Stimulus set JSON from 'experiment run'")->required();
  ex_an->add_option("--ratings", an_ratings, "Ratings CSV (perceiver proxy if absent)");
  ex_an->add_option("--max-repeat-spread", screening.max_repeat_spread)->capture_default_str();
  ex_an->add_option("--out", an_out, "Report JSON ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*stats) {
      const auto report = lg::compute_stats(lg::load_annotation(stats_file));
      std::cout << (stats_text ? lg::to_text(report) : lg::to_json(report).dump(2) + "\n");
    } else if (*synth_corpus) {
      lg::SynthSpec spec;
      spec.n_episodes = n_episodes;
      spec.seed = corpus_seed.get();
      write_text(corpus_out, lg::serialize_annotation(lg::generate_synthetic_corpus(spec)));
    } else if (*fit) {
      const auto corpus = lg::load_annotation(fit_corpus);
      const auto m = fit_baseline ? lg::baseline_length_model(corpus) : lg::select_length_model(corpus);
      write_json(fit_out, lg::to_json(m));
    } else if (*tp) {
      const auto corpus = lg::load_annotation(tp_corpus);
      const auto lengths = !tp_length.empty() ? lg::length_model_from_json(read_json(tp_length))
                           : tp_cfg.mask_emotion ? lg::baseline_length_model(corpus)
                                                 : lg::select_length_model(corpus);
      tp_cfg.seed = tp_seed.get();
      const auto r = lg::train(lg::init_params(corpus.inventory, tp_cfg.seed, tp_dims), corpus,
                               lengths, tp_cfg);
      std::cerr << "epochs " << r.epochs_run << "  nll " << r.final.mean_nll << "  accuracy "
                << r.final.accuracy << "\n";
      write_json(tp_out, lg::to_json(r.model));
    } else if (*gen) {
      const auto m = load_phones(gen_model);
      req.speaker = speaker_named(gen_speaker);
      req.seed = gen_seed.get();
      std::string text;
      for (const auto& seq : lg::generate(m, req)) text += lg::join_phones(seq) + "\n";
      write_text(gen_out, text);
    } else if (*ta) {
      const auto corpus = lg::load_annotation(ta_corpus);
      const auto seed = ta_seed.get();
      lg::Rng rng(seed);
      ta_cfg.duration.epochs = ta_cfg.acoustic.epochs = ta_epochs;
      ta_cfg.duration.learning_rate = ta_cfg.acoustic.learning_rate = ta_lr;
      ta_cfg.duration.seed = rng();
      ta_cfg.acoustic.seed = rng();
      const auto r = lg::train_acoustic(
          lg::init_acoustic_model(speaker_named(ta_speaker), rng(), ta_hidden, ta_layers), corpus,
          ta_cfg);
      std::cerr << "duration mse " << r.duration.mse_trace.back() << "  acoustic mse "
                << r.acoustic.mse_trace.back() << "\n";
      write_json(ta_out, lg::to_json(r.model));
    } else if (*rf) {
      if (rf_opt.phones.empty()) throw lg::DomainError("render-features needs --phones");
      const auto track = render_track(lg::split_phones(rf_opt.phones),
                                      lg::scale_emotion(rf_opt.ple, rf_opt.aro),
                                      speaker_named(rf_opt.speaker), rf_opt.backend, rf_opt.acoustic);
      lg::write_feature_dump(track, rf_out);
    } else if (*sy) {
      const auto speaker = speaker_named(sy_opt.speaker);
      const auto e = lg::scale_emotion(sy_opt.ple, sy_opt.aro);
      lg::Rng master(sy_seed.get());
      std::optional<lg::AcousticModel> am;
      auto track_of = [&](const std::vector<lg::PhoneToken>& phones) {
        if (sy_opt.backend == "reference") return lg::reference_render(phones, e, speaker).track;
        if (!am) am = load_acoustic(sy_opt.acoustic);
        return lg::render_features(*am, phones, e).track;
      };
      const lg::VocoderConfig vc;
      if (!sy_opt.phones_file.empty()) {
        if (sy_dir.empty()) throw lg::DomainError("--phones-file needs --out-dir");
        std::filesystem::create_directories(sy_dir);
        const auto lines = read_phone_lines(sy_opt.phones_file);
        for (std::size_t i = 0; i < lines.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "%03zu.wav", i);
          lg::write_wav(lg::synthesize(track_of(lines[i]), vc, master.split()()),
                        (std::filesystem::path(sy_dir) / name).string());
        }
      } else {
        if (sy_opt.phones.empty()) throw lg::DomainError("synth needs --phones or --phones-file");
        if (sy_out.empty()) throw lg::DomainError("synth needs --out");
        lg::write_wav(lg::synthesize(track_of(lg::split_phones(sy_opt.phones)), vc, master.split()()),
                      sy_out);
      }
    } else if (*ex_run) {
      lg::AblationModels models;
      models.phones[0] = load_phones(ex_pm);
      models.phones[1] = load_phones(ex_pp);
      models.acoustic[0] = load_acoustic(ex_am);
      models.acoustic[1] = load_acoustic(ex_ap);
      grid.seed = ex_seed.get();
      grid.speaker = speaker_named(ex_speaker);
      if (!ex_wavs.empty()) grid.wav_dir = ex_wavs;
      write_json(ex_out, lg::to_json(lg::run_ablation_grid(models, grid)));
    } else if (*ex_an) {
      const auto set = lg::stimulus_set_from_json(read_json(an_stimuli));
      nlohmann::json out;
      lg::AblationReport report;
      if (an_ratings.empty()) {
        report = lg::analyze_ablation(set, lg::proxy_perception(set));
        out["source"] = "proxy";
      } else {
        const auto ingested = lg::ingest_ratings(lg::load_ratings_csv(an_ratings), set.ids(), screening);
        report = lg::analyze_ablation(set, lg::rating_perception(ingested.means));
        out["source"] = "ratings";
        out["excluded_subjects"] = ingested.screening.excluded;
        out["kept_subjects"] = ingested.screening.kept.size();
      }
      out.update(lg::to_json(report));
      write_json(an_out, out);
    }
  } catch (const lg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
