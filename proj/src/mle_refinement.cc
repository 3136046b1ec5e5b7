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

#include "advtopk/mle_refinement.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "advtopk/errors.h"
#include "advtopk/spectral_ranking.h"
#include "advtopk/text_io.h"

namespace advtopk {
namespace {

constexpr double kInvGolden = 0.6180339887498949;

void CheckEta(double eta) {
  if (!(eta > 0.5 && eta <= 1.0)) {
    throw ParameterError("eta must lie in (1/2, 1], got " +
                         std::to_string(eta));
  }
}

// Golden-section maximization of f on [a, b] down to an interval of width tol.
template <typename F>
double GoldenSectionMax(F&& f, double a, double b, double tol) {
  double x1 = b - kInvGolden * (b - a);
  double x2 = a + kInvGolden * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

}  // namespace

RefinementConfig RefinementConfig::Default(int n, double eta,
                                           ThresholdMode mode) {
  RefinementConfig cfg;
  cfg.T = std::max(1, static_cast<int>(std::ceil(std::log(std::max(n, 2)))));
  cfg.eta_for_threshold = eta;
  cfg.mode = mode;
  return cfg;
}

void RefinementConfig::Validate() const {
  if (T < 1) throw ParameterError("refinement needs T >= 1");
  if (!(c > 0.0)) throw ParameterError("threshold constant c must be > 0");
  if (!(eta_for_threshold > 0.5 && eta_for_threshold <= 1.0)) {
    throw ParameterError("threshold eta must lie in (1/2, 1]");
  }
  if (solver_grid < 2) throw ParameterError("solver grid needs >= 2 points");
  if (!(solver_tol > 0.0)) throw ParameterError("solver_tol must be > 0");
}

void RefinementTrace::WriteCsv(std::ostream& os) const {
  os << "t,replaced_count,max_change,threshold\n";
  for (const IterationRecord& r : per_iteration) {
    os << r.t << ',' << r.replaced << ',' << FormatDouble(r.max_change) << ','
       << FormatDouble(r.threshold) << '\n';
  }
}

std::vector<std::vector<Neighbor>> BuildNeighborLists(
    const ObservationBatch& batch, std::span<const std::size_t> edge_indices,
    int n) {
  std::vector<std::vector<Neighbor>> lists(n);
  for (std::size_t k : edge_indices) {
    const Edge& e = batch.edges()[k];
    const double y = batch.mean(k);
    lists[e.i].push_back({e.j, y});
    lists[e.j].push_back({e.i, 1.0 - y});
  }
  return lists;
}

std::optional<double> PointwiseLogLikelihood(double tau,
                                             std::span<const Neighbor> data,
                                             std::span<const double> w,
                                             double eta) {
  if (data.empty()) return std::nullopt;
  const double slope = 2.0 * eta - 1.0;
  double total = 0.0;
  for (const Neighbor& nb : data) {
    const double a = tau / (tau + w[nb.j]);
    const double win = (1.0 - eta) + slope * a;
    const double loss = eta - slope * a;
    if (nb.y > 0.0) total += nb.y * std::log(win);
    if (nb.y < 1.0) total += (1.0 - nb.y) * std::log(loss);
  }
  return total;
}

std::optional<double> PointwiseLogLikelihood(double tau, const ScoreVector& w,
                                             int i,
                                             const ObservationBatch& batch,
                                             double eta) {
  CheckEta(eta);
  if (!(tau >= w.w_min() && tau <= w.w_max())) {
    throw ParameterError("tau outside the score range");
  }
  std::vector<Neighbor> data;
  for (std::size_t k = 0; k < batch.num_edges(); ++k) {
    const Edge& e = batch.edges()[k];
    if (e.i == i) data.push_back({e.j, batch.mean(k)});
    if (e.j == i) data.push_back({e.i, 1.0 - batch.mean(k)});
  }
  return PointwiseLogLikelihood(tau, data, w.values(), eta);
}

double CoordinateMle(std::span<const Neighbor> data, std::span<const double> w,
                     double current, double eta, ScoreRange range,
                     int solver_grid, double solver_tol) {
  if (data.empty()) return current;
  if (range.w_min == range.w_max) return range.w_min;
  auto objective = [&](double tau) {
    return *PointwiseLogLikelihood(tau, data, w, eta);
  };

  const double step = (range.w_max - range.w_min) / (solver_grid - 1);
  auto grid_point = [&](int m) {
    return m == solver_grid - 1 ? range.w_max : range.w_min + m * step;
  };
  int best = 0;
  double best_value = objective(grid_point(0));
  for (int m = 1; m < solver_grid; ++m) {
    const double value = objective(grid_point(m));
    if (value > best_value) {
      best = m;
      best_value = value;
    }
  }
  const double lo = grid_point(std::max(best - 1, 0));
  const double hi = grid_point(std::min(best + 1, solver_grid - 1));
  const double refined = GoldenSectionMax(objective, lo, hi, solver_tol);
  const double refined_value = objective(refined);
  const double best_tau = grid_point(best);
  if (refined_value > best_value ||
      (refined_value == best_value && refined < best_tau)) {
    return refined;
  }
  return best_tau;
}

double CoordinateMle(int i, const ScoreVector& w_current,
                     const ObservationBatch& batch, double eta,
                     const RefinementConfig& cfg) {
  CheckEta(eta);
  cfg.Validate();
  if (i < 0 || i >= w_current.size()) throw ParameterError("item out of range");
  std::vector<std::size_t> all(batch.num_edges());
  std::iota(all.begin(), all.end(), 0);
  const auto lists = BuildNeighborLists(batch, all, w_current.size());
  return CoordinateMle(lists[i], w_current.values(), w_current[i], eta,
                       w_current.range(), cfg.solver_grid, cfg.solver_tol);
}

double ThresholdKnown(int t, int n, double p, double L, double eta, double c) {
  const double log_n = std::log(static_cast<double>(n));
  const double floor_level = std::sqrt(log_n / (n * p * L));
  const double start_level = std::sqrt(log_n / (p * L));
  return c / (2.0 * eta - 1.0) *
         (floor_level + std::ldexp(start_level - floor_level, -t));
}

double ThresholdEstimated(int t, int n, double p, double L, double eta_hat,
                          double c) {
  const double log_n = std::log(static_cast<double>(n));
  const double floor_level = std::pow(log_n * log_n / (n * p * L), 0.25);
  const double start_level = std::pow(n * log_n * log_n / (p * L), 0.25);
  return c / (2.0 * eta_hat - 1.0) *
         (floor_level + std::ldexp(start_level - floor_level, -t));
}

std::vector<int> TopK(std::span<const double> scores, int K) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[a] > scores[b];
  });
  order.resize(std::min<std::size_t>(K, order.size()));
  return order;
}

SpectralMleResult SpectralMle(const ObservationBatch& batch,
                              const ComparisonGraph& g, double eta, int K,
                              const RefinementConfig& cfg, ScoreRange range,
                              std::uint64_t seed) {
  const MixtureParams params(eta);
  cfg.Validate();
  range.Validate();
  batch.CheckMatches(g);
  const int n = g.n();
  if (K < 1 || K > n) {
    throw ParameterError("K must satisfy 1 <= K <= n, got " +
                         std::to_string(K));
  }

  SpectralMleResult result;
  RefinementTrace& trace = result.trace;
  if (K == n) {
    result.top_k.resize(n);
    std::iota(result.top_k.begin(), result.top_k.end(), 0);
    return result;
  }

  const EdgeSplit split = SplitEdges(g, seed);
  trace.disconnected = !g.IsConnected();
  ComparisonGraph init_graph = g.Subgraph(split.init_edges);
  ObservationBatch init_batch = batch.Restrict(split.init_edges);
  if (!trace.disconnected && !init_graph.IsConnected()) {
    trace.init_fallback = true;
    init_graph = g;
    init_batch = batch;
  }
  const RankCentralityResult initial =
      RankCentrality(init_batch, init_graph, params, range);
  trace.stationary_converged = initial.stationary.converged;
  trace.clamped_means = initial.clamped_means;

  const auto neighbors = BuildNeighborLists(batch, split.iter_edges, n);
  for (const auto& list : neighbors) {
    if (list.empty()) ++trace.isolated_items;
  }

  std::vector<double> w(initial.scores.values().begin(),
                        initial.scores.values().end());
  std::vector<double> mle(n);
  const double L = static_cast<double>(batch.L());
  for (int t = 0; t < cfg.T; ++t) {
    IterationRecord record;
    record.t = t;
    record.threshold =
        cfg.mode == ThresholdMode::kKnownEta
            ? ThresholdKnown(t, n, g.p(), L, cfg.eta_for_threshold, cfg.c)
            : ThresholdEstimated(t, n, g.p(), L, cfg.eta_for_threshold, cfg.c);
    // Jacobi sweep: every coordinate sees w^(t).
    for (int i = 0; i < n; ++i) {
      mle[i] = CoordinateMle(neighbors[i], w, w[i], eta, range,
                             cfg.solver_grid, cfg.solver_tol);
      record.max_change = std::max(record.max_change, std::abs(mle[i] - w[i]));
    }
    for (int i = 0; i < n; ++i) {
      if (std::abs(mle[i] - w[i]) > record.threshold) {
        w[i] = mle[i];
        ++record.replaced;
      }
    }
    trace.per_iteration.push_back(record);
  }
  result.top_k = TopK(w, K);
  trace.final_scores = std::move(w);
  return result;
}

}  // namespace advtopk
