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

// Monte Carlo harness: success-rate sweeps, bisection for the minimal number
// of samples per edge, and the C / (2 eta - 1)^2 fit.
//
// Trial t of row r always uses the seed DeriveSeed(seed, {r, t}), so results
// do not depend on how trials are spread over threads.

#ifndef ADVTOPK_EXPERIMENT_H_
#define ADVTOPK_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "advtopk/core_model.h"
#include "advtopk/eta_estimation.h"

namespace advtopk {

enum class PipelineMode {
  kKnownEta,
  // Experimental: eta is estimated from worker-level responses (L workers,
  // each answering every edge) before ranking. Needs 2|E| <= tensor_cap.
  kUnknownEta,
};

struct SweepConfig {
  int n = 200;
  int K = 5;
  double p = 0.0;  // 0 means 6 log(n) / n
  ScoreRange range;
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<double> eta_grid;
  std::vector<double> delta_k_grid;
  std::vector<std::int64_t> L_grid;
  PipelineMode mode = PipelineMode::kKnownEta;
  int threads = 0;  // 0 means std::thread::hardware_concurrency()
  int tensor_cap = kDefaultTensorCap;

  // n = 200, K = 5, trials = 200.
  static SweepConfig DeskScale();
  // n = 1000, K = 10, trials = 1000.
  static SweepConfig PaperScale();

  double EdgeProbability() const;
  int ThreadCount() const;
  // Throws ParameterError on out-of-range values. Grids may be empty here;
  // each sweep checks the grids it uses.
  void Validate() const;
};

struct SweepRow {
  double eta = 0.0;
  double delta_k = 0.0;
  std::int64_t L = 0;
  double s_norm = 0.0;
  int successes = 0;
  int trials = 0;
  double rate = 0.0;
  double wilson = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  // eta,delta_k,L,s_norm,successes,trials,rate,wilson; 9 significant digits.
  void WriteCsv(std::ostream& os) const;
};

// Half-width of the 95% Wilson score interval.
double WilsonHalfWidth(int successes, int trials);

// C(n, 2) p L (2 eta - 1)^2 delta^2 / (n log n).
double NormalizedSampleSize(int n, double p, double L, double eta,
                            double delta_k);

// Rescales w_{K+1..n} toward w_min so that (w_K - w_{K+1}) / max(w) equals
// delta_k exactly, keeping order and range. K counts from 1.
ScoreVector ImposeSeparation(const ScoreVector& w, int K, double delta_k);

// One Monte Carlo trial: true when the pipeline returns exactly the top-K set.
bool RunTrial(const SweepConfig& cfg, double eta, double delta_k,
              std::int64_t L, std::uint64_t trial_seed);

// Successes over `trials` trials seeded DeriveSeed(seed, {row, t}).
int RunTrials(const SweepConfig& cfg, double eta, double delta_k,
              std::int64_t L, std::uint64_t seed, std::uint64_t row,
              int trials);

// Every (eta, delta_k, L) on the grids, in that nesting order.
SweepResult SweepEta(const SweepConfig& cfg);

// For each eta and each target S_norm, L = max(1, round(S_norm / S_norm(L=1)))
// at delta_k_grid[0]; rows record the realized S_norm.
SweepResult SweepNormalizedSamples(const SweepConfig& cfg,
                                   const std::vector<double>& s_norm_grid);

struct BisectionConfig {
  double q_th = 0.99;
  double eps = 5e-3;
  int repeats = 10;
  // Initial bracket as a normalized sample size range; converted to L.
  double s_norm_lo = 0.05;
  double s_norm_hi = 64.0;
  // Trials per probe double while |q - q_th| < 2 eps, up to this factor.
  int max_trial_multiplier = 8;
  // Stop once hi - lo <= max(1, rel_width * hi).
  double rel_width = 0.01;
};

struct BisectionRun {
  std::int64_t L_hat = 0;
  double rate = 0.0;
  int probes = 0;
  // |rate - q_th| < eps was reached; otherwise the bracket collapsed and
  // L_hat is its upper end.
  bool converged = false;
};

struct BisectionResult {
  double eta = 0.0;
  std::int64_t L_hat = 0;  // first run
  double success_rate_at_L_hat = 0.0;
  int iterations = 0;
  std::vector<BisectionRun> runs;
  std::vector<std::int64_t> repeats;
  double mean_L = 0.0;
  double std_L = 0.0;

  // eta,run,L_hat,rate
  void WriteCsv(std::ostream& os, bool header = true) const;
};

// Success rate at L with `trials` fresh trials; `probe` numbers the calls.
using RateOracle =
    std::function<double(std::int64_t L, int trials, int probe)>;

// Bisection over integer L in [lo, hi]. Throws BracketingError unless
// rate(lo) < q_th <= rate(hi).
BisectionRun BisectMinL(const RateOracle& rate, std::int64_t lo,
                        std::int64_t hi, int trials,
                        const BisectionConfig& bcfg);

// Harness version: bisects L for one eta at delta_k_grid[0], bcfg.repeats
// times with fresh seeds.
BisectionResult BisectMinL(const SweepConfig& cfg, double eta,
                           const BisectionConfig& bcfg);

struct InverseSquareFit {
  double C = 0.0;
  // RMS residual divided by the mean observed value.
  double residual = 0.0;
};

// Least-squares C in value ~ C / (2 eta - 1)^2 over (eta, value) points.
InverseSquareFit FitInverseSquare(
    const std::vector<std::pair<double, double>>& points);

}  // namespace advtopk

#endif  // ADVTOPK_EXPERIMENT_H_
