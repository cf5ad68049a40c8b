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

#include <gtest/gtest.h>

#include "laughgen/corpus/synthetic.hpp"
#include "laughgen/length_model/length_model.hpp"

namespace laughgen {
namespace {

const SpeakerId kMsy{"04_MSY", 0}, kFwa{"06_FWA", 1};

TEST(BuildDesign, InteractionColumns) {
  const std::vector<std::string> terms{"baseline:04_MSY", "x_ple", "x_ple:x_aro"};
  auto d = build_design(LengthInputs{{kMsy, {1, 1}}}, terms);
  EXPECT_EQ(d.rows.row(0), Eigen::RowVector3d(1, 1, 1));
  d = build_design(LengthInputs{{kMsy, {0, 0.5}}}, terms);
  EXPECT_EQ(d.rows(0, 2), 0.0);
  d = build_design(LengthInputs{{kMsy, {0.5, -0.5}}}, terms);
  EXPECT_DOUBLE_EQ(d.rows(0, 2), -0.25);
  d = build_design(LengthInputs{{kFwa, {0.5, -0.5}}}, terms);
  EXPECT_EQ(d.rows(0, 0), 0.0);
  EXPECT_THROW(build_design(LengthInputs{{kMsy, {0, 0}}}, {"x_valence"}), DomainError);
}

TEST(Aic, Arithmetic) {
  EXPECT_DOUBLE_EQ(aic_of(-100, 3), 206);
  EXPECT_DOUBLE_EQ(aic_of(0, 0), 0);
  EXPECT_DOUBLE_EQ(aic_of(-50.5, 2), 105);
  EXPECT_THROW(aic_of(0, -1), DomainError);
}

DesignMatrix intercept_design(Eigen::Index n) {
  return DesignMatrix{Eigen::MatrixXd::Ones(n, 1), {"1"}};
}

TEST(PoissonIrls, InterceptOnlyIsLogMean) {
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(10, 3.0);
  const auto fit = fit_poisson_irls(intercept_design(10), y);
  EXPECT_NEAR(fit.beta[0], std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.beta[0], 1.098612, 1e-6);
}

// Golden-section maximisation of the 1-D Poisson log-likelihood.
double golden_section_intercept(const Eigen::VectorXd& y) {
  auto ll = [&](double b) {
    return poisson_log_likelihood(y, Eigen::VectorXd::Constant(y.size(), b));
  };
  double lo = -5, hi = 5;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (ll(a) > ll(b)) hi = b; else lo = a;
  }
  return 0.5 * (lo + hi);
}

TEST(PoissonIrls, AgreesWithGoldenSectionOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd y(30);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = 1.0 + static_cast<double>(rng.poisson(2.5));
    const auto fit = fit_poisson_irls(intercept_design(30), y);
    EXPECT_NEAR(fit.beta[0], golden_section_intercept(y), 1e-6);
  }
}

TEST(PoissonIrls, MonotoneTraceAndScoreAtConvergence) {
  SynthSpec spec;
  spec.n_episodes = 500;
  spec.seed = 8;
  const auto c = generate_synthetic_corpus(spec);
  std::vector<std::string> terms{"baseline:04_MSY", "baseline:06_FWA", "x_ple", "x_aro",
                                 "x_ple:x_aro"};
  const auto X = build_design(length_inputs(c), terms);
  const auto y = length_targets(c);
  const auto fit = fit_poisson_irls(X, y);
  for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i)
    EXPECT_GE(fit.log_likelihood_trace[i],
              fit.log_likelihood_trace[i - 1] - 1e-12 * std::abs(fit.log_likelihood));
  const Eigen::VectorXd mu = (X.rows * fit.beta).array().exp();
  const double score = (X.rows.transpose() * (y - mu)).lpNorm<Eigen::Infinity>();
  EXPECT_LT(score, kIrlsTolerance * static_cast<double>(y.size()));
}

TEST(PoissonIrls, ErrorPaths) {
  Eigen::VectorXd y(3);
  y << 1, 0, 2;
  EXPECT_THROW(fit_poisson_irls(intercept_design(3), y), DomainError);
  Eigen::VectorXd y4(4);
  y4 << 1, 2, 3, 4;
  DesignMatrix singular{Eigen::MatrixXd(4, 2), {"x_ple", "x_aro"}};
  singular.rows << 1, 1, 2, 2, 3, 3, 4, 4;
  EXPECT_THROW(fit_poisson_irls(singular, y4), NumericError);
  DesignMatrix slope{Eigen::MatrixXd(4, 2), {"1", "x_ple"}};
  slope.rows << 1, 0, 1, 1, 1, 0, 1, 1;
  EXPECT_THROW(fit_poisson_irls(slope, y4, 1e-300, 1), NumericError);
}

TEST(PoissonIrls, RecoversTrueCoefficients) {
  SynthSpec spec;
  spec.n_episodes = 2000;
  spec.seed = 1;
  const auto m = fit_length_model(generate_synthetic_corpus(spec), {"x_ple", "x_ple:x_aro"});
  EXPECT_NEAR(m.speaker_baselines.at("04_MSY"), 1.433, 0.1);
  EXPECT_NEAR(m.speaker_baselines.at("06_FWA"), 0.936, 0.1);
  EXPECT_NEAR(m.coefficients.at("x_ple"), 0.527, 0.1);
  EXPECT_NEAR(m.coefficients.at("x_ple:x_aro"), 0.750, 0.1);
  EXPECT_DOUBLE_EQ(m.aic, 2.0 * 4 - 2.0 * m.log_likelihood);
}

TEST(Stepwise, SingleCandidateComparesTwoModels) {
  SynthSpec spec;
  spec.n_episodes = 200;
  const auto c = generate_synthetic_corpus(spec);
  const auto X = build_design(length_inputs(c), {"baseline:04_MSY", "baseline:06_FWA", "x_ple"});
  const auto sel = stepwise_select(X, length_targets(c), Family::kPoisson,
                                   {"baseline:04_MSY", "baseline:06_FWA"});
  EXPECT_EQ(sel.models_compared, 2u);
}

TEST(Stepwise, SelectsTrueTermStructure) {
  SynthSpec spec;
  spec.n_episodes = 2000;
  spec.seed = 1;
  const auto m = select_length_model(generate_synthetic_corpus(spec));
  EXPECT_EQ(m.selected_terms, (std::vector<std::string>{"baseline:04_MSY", "baseline:06_FWA",
                                                        "x_ple", "x_ple:x_aro"}));
}

TEST(Stepwise, AicNoWorseThanEmptyOrFull) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthSpec spec;
    spec.n_episodes = 300;
    spec.seed = seed;
    const auto c = generate_synthetic_corpus(spec);
    const auto sel = select_length_model(c);
    const auto empty = baseline_length_model(c);
    const auto full = fit_length_model(c, length_term_pool());
    EXPECT_LE(sel.aic, empty.aic + 1e-9);
    EXPECT_LE(sel.aic, full.aic + 1e-9);
  }
}

TEST(Stepwise, InterceptOnlyTruthDropsEmotionTerms) {
  int intercept_only = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthSpec spec;
    spec.n_episodes = 2000;
    spec.seed = seed;
    spec.truth.coefficients.clear();
    const auto m = select_length_model(generate_synthetic_corpus(spec));
    intercept_only += m.coefficients.empty();
  }
  RecordProperty("intercept_only_seeds", intercept_only);
  EXPECT_GE(intercept_only, 18) << "intercept-only selected in " << intercept_only << "/20";
}

TEST(PredictLambda, ReferenceCoefficients) {
  const auto m = reference_length_model();
  EXPECT_NEAR(predict_lambda(m, kMsy, scale_emotion(4, 4)), std::exp(1.433), 1e-12);
  EXPECT_NEAR(predict_lambda(m, kMsy, scale_emotion(4, 4)), 4.1913, 1e-3);
  EXPECT_NEAR(predict_lambda(m, kMsy, scale_emotion(7, 7)), 15.029, 1e-3);
  EXPECT_NEAR(predict_lambda(m, kFwa, scale_emotion(4, 4)), 2.5498, 1e-3);
  EXPECT_THROW(predict_lambda(m, SpeakerId{"07_XYZ", 2}, {}), DomainError);
}

TEST(PredictLambda, PositiveAndMonotoneInPleasantness) {
  const auto m = reference_length_model();
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const double aro = rng.uniform(-0.7, 1.0);
    const double p1 = rng.uniform(-1, 1), p2 = rng.uniform(-1, 1);
    const double l1 = predict_lambda(m, kMsy, {p1, aro}), l2 = predict_lambda(m, kMsy, {p2, aro});
    EXPECT_GT(l1, 0.0);
    if (p1 < p2) EXPECT_LT(l1, l2);
  }
}

TEST(Ols, ExactLine) {
  DesignMatrix X{Eigen::MatrixXd(5, 2), {"1", "x"}};
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    X.rows(i, 0) = 1;
    X.rows(i, 1) = i;
    y[i] = 2.0 * i;
  }
  const auto fit = fit_ols(X, y);
  EXPECT_NEAR(fit.beta[0], 0.0, 1e-12);
  EXPECT_NEAR(fit.beta[1], 2.0, 1e-12);
  EXPECT_EQ(fit.residual_variance, 0.0);
}

TEST(Ols, ConstantResponse) {
  DesignMatrix X{Eigen::MatrixXd(6, 2), {"1", "x"}};
  for (int i = 0; i < 6; ++i) {
    X.rows(i, 0) = 1;
    X.rows(i, 1) = i * i;
  }
  const auto fit = fit_ols(X, Eigen::VectorXd::Constant(6, 0.7));
  EXPECT_NEAR(fit.beta[0], 0.7, 1e-12);
  EXPECT_NEAR(fit.beta[1], 0.0, 1e-12);
}

TEST(Ols, AicMatchesGaussianLikelihood) {
  Rng rng(3);
  DesignMatrix X{Eigen::MatrixXd(50, 2), {"1", "x"}};
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    X.rows(i, 0) = 1;
    X.rows(i, 1) = rng.uniform();
    y[i] = 1 + X.rows(i, 1) + rng.normal(0, 0.3);
  }
  const auto fit = fit_ols(X, y);
  double ll = 0;
  for (int i = 0; i < 50; ++i) {
    const double r = y[i] - X.rows.row(i).dot(fit.beta);
    ll += -0.5 * std::log(2 * M_PI * fit.residual_variance) - r * r / (2 * fit.residual_variance);
  }
  EXPECT_NEAR(fit.log_likelihood, ll, 1e-9);
  EXPECT_NEAR(fit.aic, 2 * 3 - 2 * ll, 1e-9);
  DesignMatrix dup{Eigen::MatrixXd::Ones(5, 2), {"1", "x"}};
  EXPECT_THROW(fit_ols(dup, Eigen::VectorXd::Ones(5)), NumericError);
}

TEST(LengthModelJson, RoundTrip) {
  const auto m = reference_length_model();
  const auto j = to_json(m);
  EXPECT_EQ(j["type"], "poisson_glm");
  const auto back = length_model_from_json(j);
  EXPECT_EQ(back.coefficients, m.coefficients);
  EXPECT_EQ(back.speaker_baselines, m.speaker_baselines);
  EXPECT_EQ(back.selected_terms, m.selected_terms);
}

}  // namespace
}  // namespace laughgen
