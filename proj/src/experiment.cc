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

#include "advtopk/experiment.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "advtopk/errors.h"
#include "advtopk/mle_refinement.h"
#include "advtopk/random.h"
#include "advtopk/text_io.h"

namespace advtopk {
namespace {

constexpr double kWilsonZ = 1.959963985;
constexpr std::uint64_t kBisectionTag = 0xb15ec7;

bool IsTopK(const std::vector<int>& top_k, int K) {
  std::vector<int> sorted = top_k;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < K; ++i) {
    if (i >= static_cast<int>(sorted.size()) || sorted[i] != i) return false;
  }
  return true;
}

void CheckEtaGrid(const std::vector<double>& grid) {
  if (grid.empty()) throw ParameterError("eta grid is empty");
  for (double eta : grid) {
    if (!(eta > 0.5 && eta <= 1.0)) {
      throw ParameterError("eta grid values must lie in (1/2, 1]");
    }
  }
}

void CheckDeltaGrid(const std::vector<double>& grid) {
  if (grid.empty()) throw ParameterError("delta_K grid is empty");
  for (double d : grid) {
    if (!(d >= 0.0 && d <= 1.0)) {
      throw ParameterError("delta_K values must lie in [0, 1]");
    }
  }
}

// L at which the normalized sample size equals one.
double UnitL(const SweepConfig& cfg, double eta, double delta_k) {
  const double unit =
      NormalizedSampleSize(cfg.n, cfg.EdgeProbability(), 1.0, eta, delta_k);
  if (!(unit > 0.0)) {
    throw ParameterError("normalized sample size is zero at delta_K = 0");
  }
  return 1.0 / unit;
}

}  // namespace

SweepConfig SweepConfig::DeskScale() {
  SweepConfig cfg;
  cfg.n = 200;
  cfg.K = 5;
  cfg.trials = 200;
  return cfg;
}

SweepConfig SweepConfig::PaperScale() {
  SweepConfig cfg;
  cfg.n = 1000;
  cfg.K = 10;
  cfg.trials = 1000;
  return cfg;
}

double SweepConfig::EdgeProbability() const {
  return p > 0.0 ? p : DefaultEdgeProbability(n);
}

int SweepConfig::ThreadCount() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void SweepConfig::Validate() const {
  if (n < 2) throw ParameterError("need n >= 2");
  if (K < 1 || K >= n) throw ParameterError("need 1 <= K < n");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  range.Validate();
  if (trials < 1) throw ParameterError("need at least one trial");
  if (threads < 0) throw ParameterError("thread count must be >= 0");
  for (std::int64_t L : L_grid) {
    if (L < 1) throw ParameterError("L values must be >= 1");
  }
}

void SweepResult::WriteCsv(std::ostream& os) const {
  os << "eta,delta_k,L,s_norm,successes,trials,rate,wilson\n";
  for (const SweepRow& r : rows) {
    os << FormatCsvDouble(r.eta) << ',' << FormatCsvDouble(r.delta_k) << ','
       << r.L << ',' << FormatCsvDouble(r.s_norm) << ',' << r.successes << ','
       << r.trials << ',' << FormatCsvDouble(r.rate) << ','
       << FormatCsvDouble(r.wilson) << '\n';
  }
}

double WilsonHalfWidth(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw ParameterError("need 0 <= successes <= trials, trials >= 1");
  }
  const double nt = trials;
  const double q = successes / nt;
  const double z2 = kWilsonZ * kWilsonZ;
  return kWilsonZ * std::sqrt(q * (1.0 - q) / nt + z2 / (4.0 * nt * nt)) /
         (1.0 + z2 / nt);
}

double NormalizedSampleSize(int n, double p, double L, double eta,
                            double delta_k) {
  const double pairs = 0.5 * n * (n - 1.0);
  const double s = (2.0 * eta - 1.0) * delta_k;
  return pairs * p * L * s * s / (n * std::log(static_cast<double>(n)));
}

ScoreVector ImposeSeparation(const ScoreVector& w, int K, double delta_k) {
  const int n = w.size();
  if (K < 1 || K >= n) throw ParameterError("need 1 <= K < n");
  if (!w.IsNonIncreasing()) {
    throw ParameterError("scores must be sorted non-increasing");
  }
  if (!(delta_k >= 0.0 && delta_k <= 1.0)) {
    throw ParameterError("delta_K must lie in [0, 1]");
  }
  const double w_min = w.w_min();
  const double top = w[K - 1] - delta_k * w.MaxEntry();
  if (top < w_min) {
    throw ParameterError("delta_K = " + std::to_string(delta_k) +
                         " is infeasible: w_K - delta_K w_max falls below "
                         "w_min");
  }
  std::vector<double> values(w.values().begin(), w.values().end());
  const double old_top = w[K];
  for (int j = K; j < n; ++j) {
    if (old_top > w_min) {
      values[j] = w_min + (w[j] - w_min) * (top - w_min) / (old_top - w_min);
    } else {
      values[j] = top;
    }
  }
  // Exact gap at the boundary.
  values[K] = top;
  return ScoreVector(std::move(values), w.range());
}

bool RunTrial(const SweepConfig& cfg, double eta, double delta_k,
              std::int64_t L, std::uint64_t trial_seed) {
  const double p = cfg.EdgeProbability();
  const ScoreVector w = ImposeSeparation(
      GenerateScores(cfg.n, cfg.range, trial_seed), cfg.K, delta_k);
  const ComparisonGraph g = GenerateErGraph(cfg.n, p, trial_seed);
  try {
    if (cfg.mode == PipelineMode::kKnownEta) {
      const ObservationBatch batch = SampleObservations(
          w, g, MixtureParams(eta), L, trial_seed, /*keep_samples=*/false);
      const auto result =
          SpectralMle(batch, g, eta, cfg.K,
                      RefinementConfig::Default(cfg.n, eta), cfg.range,
                      trial_seed);
      return IsTopK(result.top_k, cfg.K);
    }
    if (L > std::numeric_limits<int>::max()) {
      throw ParameterError("worker count too large");
    }
    const WorkerResponses wr =
        SampleWorkerResponses(w, g, eta, static_cast<int>(L), trial_seed);
    const EtaEstimate est =
        EstimateEtaTensor(EmpiricalMoments(wr, true, cfg.tensor_cap));
    const auto result = SpectralMle(
        ToObservationBatch(wr), g, est.eta_hat, cfg.K,
        RefinementConfig::Default(cfg.n, est.eta_hat,
                                  ThresholdMode::kEstimatedEta),
        cfg.range, trial_seed);
    return IsTopK(result.top_k, cfg.K);
  } catch (const ConditioningError&) {
    return false;
  } catch (const DegenerateInputError&) {
    return false;
  } catch (const DegenerateMixtureError&) {
    return false;
  }
}

int RunTrials(const SweepConfig& cfg, double eta, double delta_k,
              std::int64_t L, std::uint64_t seed, std::uint64_t row,
              int trials) {
  std::vector<std::uint8_t> outcome(trials, 0);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int t = next++; t < trials && !failed; t = next++) {
      try {
        outcome[t] = RunTrial(cfg, eta, delta_k, L,
                              DeriveSeed(seed, {row, std::uint64_t(t)}));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min(cfg.ThreadCount(), trials);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return std::accumulate(outcome.begin(), outcome.end(), 0);
}

SweepResult SweepEta(const SweepConfig& cfg) {
  cfg.Validate();
  CheckEtaGrid(cfg.eta_grid);
  CheckDeltaGrid(cfg.delta_k_grid);
  if (cfg.L_grid.empty()) throw ParameterError("L grid is empty");
  // Fail early on infeasible separations instead of inside a worker thread.
  const ScoreVector probe = GenerateScores(cfg.n, cfg.range, cfg.seed);
  for (double d : cfg.delta_k_grid) ImposeSeparation(probe, cfg.K, d);

  const double p = cfg.EdgeProbability();
  SweepResult result;
  std::uint64_t row = 0;
  for (double eta : cfg.eta_grid) {
    for (double d : cfg.delta_k_grid) {
      for (std::int64_t L : cfg.L_grid) {
        SweepRow r;
        r.eta = eta;
        r.delta_k = d;
        r.L = L;
        r.s_norm = NormalizedSampleSize(cfg.n, p, L, eta, d);
        r.trials = cfg.trials;
        r.successes = RunTrials(cfg, eta, d, L, cfg.seed, row++, cfg.trials);
        r.rate = static_cast<double>(r.successes) / r.trials;
        r.wilson = WilsonHalfWidth(r.successes, r.trials);
        result.rows.push_back(r);
      }
    }
  }
  return result;
}

SweepResult SweepNormalizedSamples(const SweepConfig& cfg,
                                   const std::vector<double>& s_norm_grid) {
  cfg.Validate();
  CheckEtaGrid(cfg.eta_grid);
  CheckDeltaGrid(cfg.delta_k_grid);
  if (s_norm_grid.empty()) throw ParameterError("S_norm grid is empty");
  for (double s : s_norm_grid) {
    if (!(s > 0.0)) throw ParameterError("S_norm values must be positive");
  }
  const double d = cfg.delta_k_grid.front();
  ImposeSeparation(GenerateScores(cfg.n, cfg.range, cfg.seed), cfg.K, d);
  const double p = cfg.EdgeProbability();
  SweepResult result;
  std::uint64_t row = 0;
  for (double eta : cfg.eta_grid) {
    const double unit_L = UnitL(cfg, eta, d);
    for (double s : s_norm_grid) {
      SweepRow r;
      r.eta = eta;
      r.delta_k = d;
      r.L = std::max<std::int64_t>(1, std::llround(s * unit_L));
      r.s_norm = NormalizedSampleSize(cfg.n, p, r.L, eta, d);
      r.trials = cfg.trials;
      r.successes = RunTrials(cfg, eta, d, r.L, cfg.seed, row++, cfg.trials);
      r.rate = static_cast<double>(r.successes) / r.trials;
      r.wilson = WilsonHalfWidth(r.successes, r.trials);
      result.rows.push_back(r);
    }
  }
  return result;
}

void BisectionResult::WriteCsv(std::ostream& os, bool header) const {
  if (header) os << "eta,run,L_hat,rate\n";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    os << FormatCsvDouble(eta) << ',' << k << ',' << runs[k].L_hat << ','
       << FormatCsvDouble(runs[k].rate) << '\n';
  }
}

BisectionRun BisectMinL(const RateOracle& rate, std::int64_t lo,
                        std::int64_t hi, int trials,
                        const BisectionConfig& bcfg) {
  if (!(bcfg.q_th > 0.0 && bcfg.q_th < 1.0)) {
    throw ParameterError("q_th must lie in (0, 1)");
  }
  if (!(bcfg.eps > 0.0)) throw ParameterError("eps must be positive");
  if (lo < 1 || hi <= lo) throw ParameterError("need 1 <= lo < hi");
  if (trials < 1 || bcfg.max_trial_multiplier < 1) {
    throw ParameterError("need trials >= 1 and max_trial_multiplier >= 1");
  }
  BisectionRun run;
  auto estimate = [&](std::int64_t L) {
    int t = trials;
    double q = rate(L, t, run.probes++);
    while (std::abs(q - bcfg.q_th) < 2.0 * bcfg.eps &&
           t < trials * bcfg.max_trial_multiplier) {
      t *= 2;
      q = rate(L, t, run.probes++);
    }
    return q;
  };
  auto close = [&](double q) { return std::abs(q - bcfg.q_th) < bcfg.eps; };

  const double q_lo = estimate(lo);
  const double q_hi = estimate(hi);
  if (close(q_lo)) return {lo, q_lo, run.probes, true};
  if (close(q_hi)) return {hi, q_hi, run.probes, true};
  if (!(q_lo < bcfg.q_th && q_hi >= bcfg.q_th)) {
    throw BracketingError(
        "bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
        "] does not straddle q_th = " + FormatCsvDouble(bcfg.q_th) +
        ": rate(lo) = " + FormatCsvDouble(q_lo) +
        ", rate(hi) = " + FormatCsvDouble(q_hi));
  }
  double rate_hi = q_hi;
  while (hi - lo > std::max<double>(1.0, bcfg.rel_width * hi)) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    const double q = estimate(mid);
    if (close(q)) return {mid, q, run.probes, true};
    if (q < bcfg.q_th) {
      lo = mid;
    } else {
      hi = mid;
      rate_hi = q;
    }
  }
  return {hi, rate_hi, run.probes, false};
}

BisectionResult BisectMinL(const SweepConfig& cfg, double eta,
                           const BisectionConfig& bcfg) {
  cfg.Validate();
  CheckEtaGrid({eta});
  CheckDeltaGrid(cfg.delta_k_grid);
  if (bcfg.repeats < 1) throw ParameterError("need repeats >= 1");
  if (!(bcfg.s_norm_lo > 0.0 && bcfg.s_norm_hi > bcfg.s_norm_lo)) {
    throw ParameterError("need 0 < s_norm_lo < s_norm_hi");
  }
  const double d = cfg.delta_k_grid.front();
  ImposeSeparation(GenerateScores(cfg.n, cfg.range, cfg.seed), cfg.K, d);
  const double unit_L = UnitL(cfg, eta, d);
  const std::int64_t lo =
      std::max<std::int64_t>(1, std::llround(std::floor(bcfg.s_norm_lo * unit_L)));
  const std::int64_t hi = std::max<std::int64_t>(
      lo + 1, std::llround(std::ceil(bcfg.s_norm_hi * unit_L)));

  BisectionResult result;
  result.eta = eta;
  for (int rep = 0; rep < bcfg.repeats; ++rep) {
    const std::uint64_t run_seed = DeriveSeed(
        cfg.seed, {kBisectionTag, std::bit_cast<std::uint64_t>(eta),
                   std::uint64_t(rep)});
    RateOracle oracle = [&](std::int64_t L, int trials, int probe) {
      const int s = RunTrials(cfg, eta, d, L, run_seed, std::uint64_t(probe),
                              trials);
      return static_cast<double>(s) / trials;
    };
    BisectionRun run = BisectMinL(oracle, lo, hi, cfg.trials, bcfg);
    result.iterations += run.probes;
    result.runs.push_back(run);
    result.repeats.push_back(run.L_hat);
  }
  result.L_hat = result.runs.front().L_hat;
  result.success_rate_at_L_hat = result.runs.front().rate;
  double sum = 0.0;
  for (std::int64_t L : result.repeats) sum += static_cast<double>(L);
  result.mean_L = sum / result.repeats.size();
  double ss = 0.0;
  for (std::int64_t L : result.repeats) {
    ss += (L - result.mean_L) * (L - result.mean_L);
  }
  result.std_L = result.repeats.size() > 1
                     ? std::sqrt(ss / (result.repeats.size() - 1))
                     : 0.0;
  return result;
}

InverseSquareFit FitInverseSquare(
    const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ParameterError("need at least two points");
  double num = 0.0;
  double den = 0.0;
  double mean = 0.0;
  for (const auto& [eta, value] : points) {
    if (!(eta > 0.5)) throw ParameterError("eta values must exceed 1/2");
    const double g = 1.0 / ((2.0 * eta - 1.0) * (2.0 * eta - 1.0));
    num += value * g;
    den += g * g;
    mean += value;
  }
  mean /= points.size();
  InverseSquareFit fit;
  fit.C = num / den;
  double ss = 0.0;
  for (const auto& [eta, value] : points) {
    const double r = value - fit.C / ((2.0 * eta - 1.0) * (2.0 * eta - 1.0));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / points.size()) / mean;
  return fit;
}

}  // namespace advtopk
