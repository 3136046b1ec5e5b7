// Copyright 2026 The advtopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "advtopk/core_model.h"
#include "advtopk/errors.h"
#include "advtopk/experiment.h"
#include "advtopk/random.h"

namespace advtopk {
namespace {

BisectionConfig StepConfig() {
  BisectionConfig b;
  b.q_th = 0.99;
  b.eps = 5e-3;
  b.rel_width = 0.0;
  return b;
}

TEST_CASE("Wilson half-width") {
  const double z = 1.959963985;
  const double expect =
      z * std::sqrt(0.25 / 100 + z * z / 40000) / (1 + z * z / 100);
  CHECK(WilsonHalfWidth(50, 100) == doctest::Approx(expect));
  CHECK(WilsonHalfWidth(0, 10) > 0.0);
  CHECK_THROWS_AS(WilsonHalfWidth(11, 10), ParameterError);
}

TEST_CASE("normalized sample size is linear in L") {
  const double p = DefaultEdgeProbability(200);
  const double s1 = NormalizedSampleSize(200, p, 10, 0.8, 0.4);
  CHECK(NormalizedSampleSize(200, p, 20, 0.8, 0.4) == 2 * s1);
  const double expect = 199.0 * 200 / 2 * p * 10 * 0.36 * 0.16 /
                        (200 * std::log(200.0));
  CHECK(s1 == doctest::Approx(expect));
}

TEST_CASE("imposed separation is exact and keeps the order") {
  const ScoreVector w = GenerateScores(50, {0.5, 1.0}, 3);
  for (double d : {0.0, 0.1, 0.3}) {
    const ScoreVector v = ImposeSeparation(w, 5, d);
    CHECK(DeltaK(v, 5) == doctest::Approx(d).epsilon(1e-12));
    CHECK(v.IsNonIncreasing());
    for (int i = 0; i < 5; ++i) CHECK(v[i] == w[i]);
  }
  CHECK_THROWS_AS(ImposeSeparation(w, 5, 0.9), ParameterError);
}

TEST_CASE("run trial is a pure function of its seed") {
  SweepConfig cfg = SweepConfig::DeskScale();
  cfg.n = 60;
  for (std::uint64_t s = 0; s < 5; ++s) {
    CHECK(RunTrial(cfg, 0.8, 0.3, 20, s) == RunTrial(cfg, 0.8, 0.3, 20, s));
  }
}

TEST_CASE("zero separation stays near chance") {
  SweepConfig cfg = SweepConfig::DeskScale();
  cfg.threads = 1;
  const int wins = RunTrials(cfg, 1.0, 0.0, 50, 11, 0, 40);
  CHECK(wins / 40.0 < 0.5);
}

TEST_CASE("well above the sufficient sample size succeeds at eta = 1") {
  SweepConfig cfg = SweepConfig::DeskScale();
  const double unit =
      NormalizedSampleSize(cfg.n, cfg.EdgeProbability(), 1.0, 1.0, 0.4);
  const auto L = static_cast<std::int64_t>(std::ceil(25.0 / unit));
  const int wins = RunTrials(cfg, 1.0, 0.4, L, 21, 0, 100);
  CHECK(wins >= 99);
}

TEST_CASE("single grid point with one trial") {
  SweepConfig cfg = SweepConfig::DeskScale();
  cfg.n = 40;
  cfg.K = 3;
  cfg.trials = 1;
  cfg.eta_grid = {0.9};
  cfg.delta_k_grid = {0.3};
  cfg.L_grid = {30};
  const SweepResult r = SweepEta(cfg);
  REQUIRE(r.rows.size() == 1);
  CHECK((r.rows[0].successes == 0 || r.rows[0].successes == 1));
  std::ostringstream os;
  r.WriteCsv(os);
  CHECK(os.str().rfind("eta,delta_k,L,s_norm,successes,trials,rate,wilson\n",
                       0) == 0);
}

TEST_CASE("sweeps are identical across thread counts") {
  SweepConfig cfg = SweepConfig::DeskScale();
  cfg.n = 50;
  cfg.K = 3;
  cfg.trials = 24;
  cfg.eta_grid = {0.7, 0.9};
  cfg.delta_k_grid = {0.2, 0.3};
  cfg.L_grid = {10, 40};
  std::string out[2];
  int k = 0;
  for (int threads : {1, 8}) {
    cfg.threads = threads;
    std::ostringstream os;
    SweepEta(cfg).WriteCsv(os);
    out[k++] = os.str();
  }
  CHECK(out[0] == out[1]);
}

TEST_CASE("doubling L doubles the recorded normalized size") {
  SweepConfig cfg = SweepConfig::DeskScale();
  cfg.n = 40;
  cfg.K = 3;
  cfg.trials = 2;
  cfg.eta_grid = {0.8};
  cfg.delta_k_grid = {0.4};
  const SweepResult r = SweepNormalizedSamples(cfg, {4.0, 8.0});
  REQUIRE(r.rows.size() == 2);
  const double ratio = r.rows[1].s_norm / r.rows[0].s_norm;
  CHECK(ratio ==
        doctest::Approx(static_cast<double>(r.rows[1].L) / r.rows[0].L));
  if (r.rows[1].L == 2 * r.rows[0].L) CHECK(ratio == 2.0);
}

TEST_CASE("bisection finds the step of a synthetic oracle") {
  for (std::int64_t step : {2, 7, 100, 1234, 99999}) {
    int calls = 0;
    RateOracle oracle = [&](std::int64_t L, int, int) {
      ++calls;
      return L >= step ? 1.0 : 0.0;
    };
    BisectionConfig b = StepConfig();
    b.q_th = 0.5;
    b.eps = 0.1;
    const BisectionRun run = BisectMinL(oracle, 1, 200000, 10, b);
    CHECK(std::abs(run.L_hat - step) <= 1);
    CHECK(run.L_hat >= step);
    CHECK(run.rate == 1.0);
  }
}

TEST_CASE("bisection stops as soon as the rate is within eps") {
  RateOracle oracle = [](std::int64_t L, int, int) {
    return std::min(1.0, L / 1000.0);
  };
  const BisectionRun run = BisectMinL(oracle, 1, 4096, 10, StepConfig());
  CHECK(run.converged);
  CHECK(std::abs(run.rate - 0.99) < 5e-3);
}

TEST_CASE("bracket that does not straddle q_th") {
  RateOracle never = [](std::int64_t, int, int) { return 0.2; };
  CHECK_THROWS_AS(BisectMinL(never, 1, 100, 10, StepConfig()),
                  BracketingError);
  RateOracle always = [](std::int64_t, int, int) { return 1.0; };
  CHECK_THROWS_AS(BisectMinL(always, 1, 100, 10, StepConfig()),
                  BracketingError);
}

TEST_CASE("trials double near the target rate") {
  std::vector<int> seen;
  RateOracle oracle = [&](std::int64_t L, int trials, int) {
    seen.push_back(trials);
    return L >= 50 ? 0.9975 : 0.0;
  };
  BisectionConfig b = StepConfig();
  b.max_trial_multiplier = 4;
  BisectMinL(oracle, 1, 100, 10, b);
  CHECK(std::find(seen.begin(), seen.end(), 40) != seen.end());
  CHECK(*std::max_element(seen.begin(), seen.end()) == 40);
}

TEST_CASE("inverse-square fit") {
  std::vector<std::pair<double, double>> pts;
  for (double eta : {0.56, 0.6, 0.65, 0.7, 0.9}) {
    pts.push_back({eta, 3.0 / ((2 * eta - 1) * (2 * eta - 1))});
  }
  const InverseSquareFit fit = FitInverseSquare(pts);
  CHECK(fit.C == doctest::Approx(3.0));
  CHECK(fit.residual < 1e-12);
  CHECK_THROWS_AS(FitInverseSquare({{0.7, 1.0}}), ParameterError);
  CHECK_THROWS_AS(FitInverseSquare({{0.7, 1.0}, {0.5, 2.0}}), ParameterError);
}

TEST_CASE("inverse-square fit under additive noise") {
  const std::vector<double> etas = {0.56, 0.6, 0.65, 0.7};
  double sum_g2 = 0;
  for (double eta : etas) sum_g2 += std::pow(2 * eta - 1, -4);
  const double sigma = 5.0;
  const double se = sigma / std::sqrt(sum_g2);
  int inside = 0;
  const int draws = 400;
  for (int d = 0; d < draws; ++d) {
    CounterRng rng(DeriveSeed(5, {std::uint64_t(d)}));
    std::vector<std::pair<double, double>> pts;
    for (double eta : etas) {
      // Box-Muller
      const double u1 = 1.0 - rng.Uniform(), u2 = rng.Uniform();
      const double z = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
      pts.push_back({eta, 3.0 / ((2 * eta - 1) * (2 * eta - 1)) + sigma * z});
    }
    inside += std::abs(FitInverseSquare(pts).C - 3.0) < 3 * se;
  }
  CHECK(inside >= 0.98 * draws);
}

TEST_CASE("invalid sweep settings") {
  SweepConfig cfg;
  cfg.K = 0;
  CHECK_THROWS_AS(cfg.Validate(), ParameterError);
  cfg = SweepConfig::DeskScale();
  cfg.eta_grid = {0.5};
  cfg.delta_k_grid = {0.2};
  cfg.L_grid = {10};
  CHECK_THROWS_AS(SweepEta(cfg), ParameterError);
  cfg.eta_grid = {0.8};
  cfg.delta_k_grid = {0.6};
  CHECK_THROWS_AS(SweepEta(cfg), ParameterError);
}

}  // namespace
}  // namespace advtopk
