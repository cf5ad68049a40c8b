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
#include <map>

#include <gtest/gtest.h>

#include "laughgen/corpus/synthetic.hpp"
#include "laughgen/phones/model.hpp"
#include "test_util.hpp"

namespace laughgen {
namespace {

const SpeakerId kMsy = default_speakers()[0];
const SpeakerId kFwa = default_speakers()[1];

PhonesModel zero_model(const PhoneInventory& inv, PhonesDims dims = {}) {
  auto m = init_params(inv, 0, dims);
  for (auto& b : m.params.blocks()) b.value->setZero();
  return m;
}

Corpus tiny_corpus() {
  Corpus c;
  c.inventory = PhoneInventory({"ha", "hu", "H", "hi", "%ha"});
  const char* seqs[] = {"ha ha H hu", "hu hu hu hu ha H", "ha"};
  for (int i = 0; i < 3; ++i) {
    LaughterEpisode e;
    e.id = "t" + std::to_string(i);
    e.speaker = default_speakers()[static_cast<std::size_t>(i % 2)];
    e.pleasantness = 2.0 + 2.0 * i;
    e.arousal = 6.5 - 2.0 * i;
    e.events = group_events(split_phones(seqs[i]));
    c.episodes.push_back(e);
  }
  return c;
}

TEST(PhonesInit, Dimensions) {
  const auto m = init_params(default_inventory(), 1);
  EXPECT_EQ(m.dims.input(), 68);
  EXPECT_EQ(m.params.out_w.rows(), 22);
  EXPECT_EQ(m.params.out_w.cols(), 128);
  EXPECT_EQ(m.params.embedding.rows(), 64);
  EXPECT_EQ(m.params.embedding.cols(), 22);
  EXPECT_EQ(m.params.cell.W.cols(), 68);
  EXPECT_EQ(m.params.cell.U.rows(), 4 * 128);
  EXPECT_EQ(m.params.out_b, Eigen::MatrixXd::Zero(22, 1));
}

TEST(PhonesInit, DeterministicPerSeed) {
  auto a = init_params(default_inventory(), 9), b = init_params(default_inventory(), 9);
  auto c = init_params(default_inventory(), 10);
  auto ab = a.params.blocks(), bb = b.params.blocks(), cb = c.params.blocks();
  for (std::size_t k = 0; k < ab.size(); ++k) EXPECT_EQ(*ab[k].value, *bb[k].value);
  EXPECT_NE(*ab[0].value, *cb[0].value);
  EXPECT_THROW(init_params(PhoneInventory({"ha"}), 1), DomainError);
}

TEST(PhonesForward, ZeroWeightsUniform) {
  const auto m = zero_model(default_inventory());
  StepInput x{Eigen::VectorXd::Zero(64), 0.3, 1.0, {0.5, -0.5}};
  const auto out = forward_step(m, x, nn::LstmState::zeros(128));
  EXPECT_EQ(out.state.h.size(), 128);
  for (Eigen::Index k = 0; k < 22; ++k) EXPECT_NEAR(out.probs[k], 1.0 / 22, 1e-15);
}

TEST(PhonesForward, ProbabilitiesNormalised) {
  const auto m = init_params(default_inventory(), 4, {8, 6});
  Rng rng(5);
  auto state = nn::LstmState::zeros(6);
  for (int t = 0; t < 50; ++t) {
    StepInput x{m.params.embedding.col(static_cast<Eigen::Index>(rng.below(22))),
                rng.uniform(), rng.uniform() < 0.5 ? 0.0 : 1.0,
                {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
    const auto out = forward_step(m, x, state, rng.uniform(0.2, 3.0));
    EXPECT_NEAR(out.probs.sum(), 1.0, 1e-9);
    EXPECT_GT(out.probs.minCoeff(), 0.0);
    EXPECT_TRUE(out.state.h.allFinite() && out.state.c.allFinite());
    state = out.state;
  }
}

TEST(PhonesForward, RejectsBadInput) {
  const auto m = init_params(default_inventory(), 4, {8, 6});
  StepInput x{Eigen::VectorXd::Zero(8), std::nan(""), 0.0, {}};
  EXPECT_THROW(forward_step(m, x, nn::LstmState::zeros(6)), DomainError);
  x.p_end_feature = 0.1;
  x.phone_embedding = Eigen::VectorXd::Zero(7);
  EXPECT_THROW(forward_step(m, x, nn::LstmState::zeros(6)), DomainError);
}

TEST(PhonesNll, ZeroModelIsLog22) {
  const auto m = zero_model(default_inventory());
  const Conditioning cond{0.0, {}, 4.19};
  EXPECT_NEAR(sequence_nll(m, split_phones("ha ha H hu %ha"), cond), std::log(22.0), 1e-12);
  EXPECT_NEAR(std::log(22.0), 3.0910, 1e-4);
}

TEST(PhonesNll, LengthOneUsesBosOnly) {
  const auto m = init_params(default_inventory(), 2, {8, 6});
  const Conditioning cond{1.0, {0.2, 0.4}, 3.0};
  StepInput x{m.params.bos.col(0), p_end(1, 3.0), 1.0, {0.2, 0.4}};
  const auto out = forward_step(m, x, nn::LstmState::zeros(6));
  const auto idx = static_cast<Eigen::Index>(m.inventory.index_of("hu"));
  EXPECT_NEAR(sequence_nll(m, split_phones("hu"), cond), -std::log(out.probs[idx]), 1e-12);
}

TEST(PhonesNll, MatchesStepwiseForward) {
  const auto m = init_params(default_inventory(), 3, {8, 6});
  const Conditioning cond{0.0, {-0.3, 0.9}, 5.0};
  const auto phones = split_phones("ha H %hu hi");
  auto state = nn::LstmState::zeros(6);
  Eigen::VectorXd emb = m.params.bos.col(0);
  double nll = 0.0;
  for (std::size_t n = 0; n < phones.size(); ++n) {
    StepInput x{emb, p_end(static_cast<long long>(n + 1), 5.0), 0.0, cond.emotion};
    auto out = forward_step(m, x, state);
    const auto k = static_cast<Eigen::Index>(m.inventory.index_of(phones[n]));
    nll -= std::log(out.probs[k]);
    state = out.state;
    emb = m.params.embedding.col(k);
  }
  EXPECT_NEAR(sequence_nll(m, phones, cond), nll / 4.0, 1e-12);
}

TEST(PhonesNll, OutOfInventory) {
  const auto m = init_params(PhoneInventory({"ha", "hu"}), 3, {4, 3});
  EXPECT_THROW(sequence_nll(m, split_phones("ha hi"), {}), DomainError);
  EXPECT_THROW(sequence_nll(m, {}, {}), DomainError);
}

TEST(PhonesGradient, MatchesFiniteDifferences) {
  const auto tiny = tiny_corpus();
  auto m = init_params(tiny.inventory, 11, {6, 8});
  Rng rng(12);
  nn::fill_uniform(m.params.out_b, 0.5, rng);
  const auto rep = gradient_check(m, tiny, reference_length_model());
  EXPECT_LT(rep.max_error, 1e-4);
  for (const char* name : {"embedding", "bos", "lstm.W", "lstm.U", "lstm.b", "output.W",
                           "output.b"})
    EXPECT_TRUE(rep.block_error.count(name)) << name;
}

TEST(PhonesGradient, UnusedEmbeddingColumnIsExactlyZero) {
  const auto tiny = tiny_corpus();  // "hi" and "%ha" never precede another phone
  const auto m = init_params(tiny.inventory, 11, {6, 8});
  auto grad = nn::zeros_like(m.params);
  for (const auto& ex : make_examples(m, tiny, reference_length_model(), false))
    sequence_loss(m, m.params, ex.ids, ex.cond, &grad);
  for (const char* tok : {"hi", "%ha"}) {
    const auto k = static_cast<Eigen::Index>(m.inventory.index_of(tok));
    EXPECT_EQ(grad.embedding.col(k), Eigen::VectorXd::Zero(6));
  }
  EXPECT_GT(grad.embedding.col(0).norm(), 0.0);
}

TEST(PhonesTrain, OverfitsSingleEpisode) {
  Corpus c;
  c.inventory = default_inventory();
  LaughterEpisode e{"one", kMsy, {}, 6.0, 5.0};
  e.events = group_events(split_phones("ha ha H hu ha %hu"));
  c.episodes.push_back(e);
  TrainingConfig cfg;
  cfg.epochs = 3000;
  cfg.learning_rate = 1e-2;
  cfg.seed = 1;
  const auto lm = reference_length_model();
  auto r = train(init_params(c.inventory, 1, {16, 16}), c, lm, cfg);
  const auto cond = make_conditioning(kMsy, emotion_of(e), lm, false);
  EXPECT_LT(sequence_nll(r.model, flatten_episode(e), cond), 0.05);
  EXPECT_LT(r.final.mean_nll, r.initial.mean_nll);
}

TEST(PhonesTrain, ToyCorpusAccuracy) {
  const auto c = testing::toy_corpus();
  TrainingConfig cfg;
  cfg.epochs = 2000;
  cfg.learning_rate = 1e-2;
  cfg.seed = 2;
  cfg.stop_at_accuracy = 0.99;
  const auto r = train(init_params(c.inventory, 2, {16, 32}), c, reference_length_model(), cfg);
  EXPECT_GE(r.final.accuracy, 0.99) << "epochs " << r.epochs_run;
  EXPECT_LT(r.final.mean_nll, r.initial.mean_nll);
}

TEST(PhonesTrain, DeterministicTrace) {
  const auto c = testing::toy_corpus(12);
  TrainingConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 3;
  cfg.batch_size = 4;
  const auto a = train(init_params(c.inventory, 1, {8, 8}), c, reference_length_model(), cfg);
  const auto b = train(init_params(c.inventory, 1, {8, 8}), c, reference_length_model(), cfg);
  ASSERT_EQ(a.nll_trace.size(), 5u);
  EXPECT_EQ(a.nll_trace, b.nll_trace);
}

TEST(PhonesTrain, Errors) {
  const auto c = testing::toy_corpus(4);
  const auto m = init_params(c.inventory, 1, {4, 4});
  TrainingConfig cfg;
  cfg.epochs = 2;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(m, c, reference_length_model(), cfg), DomainError);
  cfg.learning_rate = 1e-3;
  cfg.mask_emotion = true;
  EXPECT_THROW(train(m, c, reference_length_model(), cfg), DomainError);
  cfg.mask_emotion = false;
  EXPECT_THROW(train(m, Corpus{}, reference_length_model(), cfg), DomainError);

  auto bad = m;
  bad.params.out_w(0, 0) = std::nan("");
  try {
    train(bad, c, reference_length_model(), cfg);
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos);
  }
}

TEST(PhonesTrain, MaskedIsEmotionInvariant) {
  const auto c = testing::toy_corpus(20);
  TrainingConfig cfg;
  cfg.epochs = 3;
  cfg.mask_emotion = true;
  const auto lm = baseline_length_model(c);
  const auto r = train(init_params(c.inventory, 1, {8, 8}), c, lm, cfg);
  EXPECT_TRUE(r.model.mask_emotion);
  GenerationRequest lo{kMsy, 4, 4, 30, 77}, hi{kMsy, 7, 7, 30, 77};
  EXPECT_EQ(generate(r.model, lo), generate(r.model, hi));
}

TEST(PhonesSample, LengthAtLeastOneAndDeterministic) {
  const auto m = init_params(default_inventory(), 1, {8, 8});
  GenerationRequest req{kFwa, 1, 1, 200, 5};
  const auto a = generate(m, req, reference_length_model());
  for (const auto& s : a) EXPECT_GE(s.size(), 1u);
  EXPECT_EQ(a, generate(m, req, reference_length_model()));
  req.seed = 6;
  EXPECT_NE(a, generate(m, req, reference_length_model()));
  req.n_draws = 0;
  EXPECT_THROW(generate(m, req, reference_length_model()), DomainError);
}

// Length law of the sampler is the zero-truncated Poisson whatever the weights.
TEST(PhonesSample, LengthDistributionIsZeroTruncatedPoisson) {
  const auto m = init_params(default_inventory(), 8, {2, 2});
  GenerationRequest req{kMsy, 4, 4, 100000, 123};
  const double lambda = predict_lambda(reference_length_model(), kMsy, {});
  std::map<std::size_t, double> hist;
  for (const auto& s : generate(m, req, reference_length_model())) hist[s.size()] += 1e-5;
  double tv = 0.0, mass = 0.0;
  for (std::size_t n = 1; n <= 60; ++n) {
    const double ztp = poisson_pmf(static_cast<long long>(n), lambda) / (1.0 - std::exp(-lambda));
    mass += ztp;
    tv += std::abs(hist[n] - ztp);
  }
  tv += 1.0 - mass;
  EXPECT_LT(0.5 * tv, 0.01);
}

TEST(PhonesSample, MeanLengthPleasantAroused) {
  const auto m = init_params(default_inventory(), 8, {2, 2});
  GenerationRequest req{kMsy, 7, 7, 10000, 9};
  double total = 0.0;
  for (const auto& s : generate(m, req, reference_length_model())) total += s.size();
  const double lambda = predict_lambda(reference_length_model(), kMsy, scale_emotion(7, 7));
  EXPECT_NEAR(lambda, 15.029, 1e-3);
  EXPECT_NEAR(total / 1e4, zero_truncated_mean(lambda), 0.3);
}

TEST(PhonesSample, TrainedOnGrammarShiftsTowardA) {
  SynthSpec spec;
  spec.n_episodes = 400;
  spec.seed = 21;
  const auto c = generate_synthetic_corpus(spec);
  TrainingConfig cfg;
  cfg.epochs = 15;
  cfg.learning_rate = 5e-3;
  cfg.seed = 4;
  const auto lm = reference_length_model();
  const auto r = train(init_params(c.inventory, 4, {16, 24}), c, lm, cfg);
  auto a_fraction = [&](double raw) {
    double a = 0.0, total = 0.0, len = 0.0;
    const auto draws = generate(r.model, {kMsy, raw, raw, 300, 8});
    for (const auto& s : draws) {
      len += s.size();
      for (const auto& p : s) {
        a += p.vowel == 'a';
        total += 1.0;
      }
    }
    return std::pair{a / total, len / 300.0};
  };
  const auto [a_lo, len_lo] = a_fraction(4.0);
  const auto [a_hi, len_hi] = a_fraction(7.0);
  EXPECT_GT(a_hi, a_lo);
  EXPECT_GT(len_hi, len_lo);
}

TEST(PhonesModelFile, JsonRoundTrip) {
  const auto c = testing::toy_corpus(6);
  TrainingConfig cfg;
  cfg.epochs = 2;
  const auto r = train(init_params(c.inventory, 1, {5, 7}), c, reference_length_model(), cfg);
  const auto j = to_json(r.model);
  EXPECT_EQ(j["dims"]["input"], 9);
  const auto back = phones_model_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
  GenerationRequest req{kMsy, 6, 6, 20, 3};
  EXPECT_EQ(generate(back, req), generate(r.model, req));
  auto broken = j;
  broken["dims"]["input"] = 68;
  EXPECT_THROW(phones_model_from_json(broken), ParseError);
  broken = j;
  broken["weights"].erase("bos");
  EXPECT_THROW(phones_model_from_json(broken), ParseError);
}

}  // namespace
}  // namespace laughgen
