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

#include "advtopk/core_model.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <utility>

#include "advtopk/errors.h"
#include "advtopk/random.h"

namespace advtopk {
namespace {

// Stream namespaces, so that e.g. graph and score draws never share a key.
enum StreamTag : std::uint64_t {
  kScoresStream = 1,
  kGraphStream = 2,
  kObservationStream = 3,
  kSplitStream = 4,
};

int FindRoot(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

void ScoreRange::Validate() const {
  if (!(w_min > 0.0) || !(w_min <= w_max) || !std::isfinite(w_max)) {
    throw ParameterError("score range requires 0 < w_min <= w_max, got [" +
                         std::to_string(w_min) + ", " + std::to_string(w_max) +
                         "]");
  }
}

ScoreVector::ScoreVector(std::vector<double> values, ScoreRange range)
    : values_(std::move(values)), range_(range) {
  range_.Validate();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= range_.w_min && values_[i] <= range_.w_max)) {
      throw ParameterError("score " + std::to_string(i) + " = " +
                           std::to_string(values_[i]) +
                           " outside the score range");
    }
  }
}

bool ScoreVector::IsNonIncreasing() const {
  return std::is_sorted(values_.begin(), values_.end(), std::greater<>());
}

double ScoreVector::MaxEntry() const {
  if (values_.empty()) throw DegenerateInputError("empty score vector");
  return *std::max_element(values_.begin(), values_.end());
}

ComparisonGraph::ComparisonGraph(int n, std::vector<Edge> edges, double p)
    : n_(n), edges_(std::move(edges)), p_(p) {
  if (n_ < 1) throw ParameterError("graph needs at least one vertex");
  if (!(p_ > 0.0 && p_ <= 1.0)) {
    throw ParameterError("edge probability must lie in (0, 1], got " +
                         std::to_string(p_));
  }
  for (Edge& e : edges_) {
    if (e.i == e.j) {
      throw ParameterError("self-loop at vertex " + std::to_string(e.i));
    }
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i < 0 || e.j >= n_) {
      throw ParameterError("edge endpoint out of range");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw ParameterError("duplicate edge in comparison graph");
  }
}

bool ComparisonGraph::below_connectivity_threshold() const {
  return n_ < 2 || p_ <= std::log(static_cast<double>(n_)) / n_;
}

std::vector<int> ComparisonGraph::Degrees() const {
  std::vector<int> degree(n_, 0);
  for (const Edge& e : edges_) {
    ++degree[e.i];
    ++degree[e.j];
  }
  return degree;
}

int ComparisonGraph::MaxDegree() const {
  const std::vector<int> degree = Degrees();
  return *std::max_element(degree.begin(), degree.end());
}

bool ComparisonGraph::IsConnected() const {
  std::vector<int> parent(n_);
  std::iota(parent.begin(), parent.end(), 0);
  int components = n_;
  for (const Edge& e : edges_) {
    const int a = FindRoot(parent, e.i);
    const int b = FindRoot(parent, e.j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

ComparisonGraph ComparisonGraph::Subgraph(
    std::span<const std::size_t> edge_indices) const {
  std::vector<Edge> kept;
  kept.reserve(edge_indices.size());
  for (std::size_t k : edge_indices) kept.push_back(edges_.at(k));
  return ComparisonGraph(n_, std::move(kept), p_);
}

std::optional<std::size_t> ComparisonGraph::FindEdge(Edge e) const {
  if (e.i > e.j) std::swap(e.i, e.j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

MixtureParams::MixtureParams(double eta) : eta_(eta) {
  if (!(eta > 0.5 && eta <= 1.0)) {
    throw ParameterError("eta must lie in (1/2, 1], got " +
                         std::to_string(eta));
  }
}

double MixtureParams::WinProbability(double wi, double wj) const {
  const double a = wi / (wi + wj);
  return eta_ * a + (1.0 - eta_) * (1.0 - a);
}

ObservationBatch ObservationBatch::FromSamples(
    std::vector<Edge> edges, std::vector<std::vector<std::uint8_t>> samples) {
  if (edges.size() != samples.size()) {
    throw ParameterError("edge and sample lists differ in length");
  }
  ObservationBatch batch;
  batch.L_ = samples.empty() ? 0 : static_cast<std::int64_t>(samples[0].size());
  if (!samples.empty() && batch.L_ == 0) {
    throw ParameterError("observation batch needs L >= 1");
  }
  batch.means_.reserve(samples.size());
  for (const auto& row : samples) {
    if (static_cast<std::int64_t>(row.size()) != batch.L_) {
      throw ParameterError("every edge must carry the same number of samples");
    }
    std::int64_t wins = 0;
    for (std::uint8_t y : row) {
      if (y > 1) throw ParameterError("outcomes must be 0 or 1");
      wins += y;
    }
    batch.means_.push_back(static_cast<double>(wins) /
                           static_cast<double>(batch.L_));
  }
  batch.edges_ = std::move(edges);
  batch.samples_ = std::move(samples);
  return batch;
}

ObservationBatch ObservationBatch::FromCounts(std::vector<Edge> edges,
                                              std::vector<std::int64_t> wins,
                                              std::int64_t L) {
  if (edges.size() != wins.size()) {
    throw ParameterError("edge and count lists differ in length");
  }
  if (L < 1) throw ParameterError("observation batch needs L >= 1");
  ObservationBatch batch;
  batch.L_ = L;
  batch.means_.reserve(wins.size());
  for (std::int64_t w : wins) {
    if (w < 0 || w > L) throw ParameterError("win count outside [0, L]");
    batch.means_.push_back(static_cast<double>(w) / static_cast<double>(L));
  }
  batch.edges_ = std::move(edges);
  return batch;
}

ObservationBatch ObservationBatch::FromMeans(std::vector<Edge> edges,
                                             std::vector<double> means,
                                             std::int64_t L) {
  if (edges.size() != means.size()) {
    throw ParameterError("edge and mean lists differ in length");
  }
  if (L < 1) throw ParameterError("observation batch needs L >= 1");
  for (double m : means) {
    if (!(m >= 0.0 && m <= 1.0)) throw ParameterError("mean outside [0, 1]");
  }
  ObservationBatch batch;
  batch.L_ = L;
  batch.edges_ = std::move(edges);
  batch.means_ = std::move(means);
  return batch;
}

ObservationBatch ObservationBatch::Restrict(
    std::span<const std::size_t> edge_indices) const {
  ObservationBatch out;
  out.L_ = L_;
  out.edges_.reserve(edge_indices.size());
  out.means_.reserve(edge_indices.size());
  for (std::size_t k : edge_indices) {
    out.edges_.push_back(edges_.at(k));
    out.means_.push_back(means_[k]);
    if (!samples_.empty()) out.samples_.push_back(samples_[k]);
  }
  return out;
}

void ObservationBatch::CheckMatches(const ComparisonGraph& g) const {
  if (!std::equal(edges_.begin(), edges_.end(), g.edges().begin(),
                  g.edges().end())) {
    throw ParameterError("observation batch edges do not match the graph");
  }
}

ScoreVector GenerateScores(int n, ScoreRange range, std::uint64_t seed) {
  range.Validate();
  if (n < 2) throw ParameterError("need at least two items");
  CounterRng rng(DeriveSeed(seed, {kScoresStream}));
  std::vector<double> values(n);
  const double width = range.w_max - range.w_min;
  for (double& v : values) {
    v = std::min(range.w_max, range.w_min + width * rng.Uniform());
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return ScoreVector(std::move(values), range);
}

ComparisonGraph GenerateErGraph(int n, double p, std::uint64_t seed) {
  if (n < 2) throw ParameterError("need at least two items");
  if (!(p > 0.0 && p <= 1.0)) {
    throw ParameterError("edge probability must lie in (0, 1]");
  }
  CounterRng rng(DeriveSeed(seed, {kGraphStream}));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(p * n * (n - 1) / 2 * 1.1) + 16);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (p >= 1.0 || rng.Bernoulli(p)) edges.push_back({i, j});
    }
  }
  return ComparisonGraph(n, std::move(edges), p);
}

double DefaultEdgeProbability(int n) {
  return std::min(1.0, 6.0 * std::log(static_cast<double>(n)) / n);
}

ObservationBatch SampleObservations(const ScoreVector& w,
                                    const ComparisonGraph& g,
                                    const MixtureParams& params, std::int64_t L,
                                    std::uint64_t seed, bool keep_samples) {
  if (L < 1) throw ParameterError("need L >= 1 samples per edge");
  if (g.n() > w.size()) {
    throw ParameterError("graph has more vertices than the score vector");
  }
  const std::uint64_t base = DeriveSeed(seed, {kObservationStream});
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  if (keep_samples) {
    std::vector<std::vector<std::uint8_t>> samples(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      const double q = params.WinProbability(w[e.i], w[e.j]);
      CounterRng rng(DeriveSeed(base, {static_cast<std::uint64_t>(e.i),
                                       static_cast<std::uint64_t>(e.j)}));
      samples[k].resize(L);
      for (auto& y : samples[k]) y = rng.Bernoulli(q) ? 1 : 0;
    }
    return ObservationBatch::FromSamples(std::move(edges), std::move(samples));
  }
  std::vector<std::int64_t> wins(edges.size(), 0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const double q = params.WinProbability(w[e.i], w[e.j]);
    CounterRng rng(DeriveSeed(base, {static_cast<std::uint64_t>(e.i),
                                     static_cast<std::uint64_t>(e.j)}));
    std::int64_t count = 0;
    for (std::int64_t l = 0; l < L; ++l) count += rng.Bernoulli(q) ? 1 : 0;
    wins[k] = count;
  }
  return ObservationBatch::FromCounts(std::move(edges), std::move(wins), L);
}

ObservationBatch ExactObservations(const ScoreVector& w,
                                   const ComparisonGraph& g,
                                   const MixtureParams& params,
                                   std::int64_t nominal_L) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  std::vector<double> means;
  means.reserve(edges.size());
  for (const Edge& e : edges) {
    means.push_back(params.WinProbability(w[e.i], w[e.j]));
  }
  return ObservationBatch::FromMeans(std::move(edges), std::move(means),
                                     nominal_L);
}

double DeltaK(const ScoreVector& w, int K) {
  if (K < 1 || K >= w.size()) {
    throw ParameterError("K must satisfy 1 <= K < n, got " +
                         std::to_string(K));
  }
  return (w[K - 1] - w[K]) / w.MaxEntry();
}

EdgeSplit SplitEdges(const ComparisonGraph& g, std::uint64_t seed) {
  const std::size_t m = g.num_edges();
  if (m < 2) throw DegenerateInputError("cannot split fewer than two edges");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(DeriveSeed(seed, {kSplitStream}));
  for (std::size_t k = m - 1; k > 0; --k) {
    std::swap(order[k], order[rng.Below(k + 1)]);
  }
  const std::size_t init_size = (m + 1) / 2;
  EdgeSplit split;
  split.init_edges.assign(order.begin(), order.begin() + init_size);
  split.iter_edges.assign(order.begin() + init_size, order.end());
  std::sort(split.init_edges.begin(), split.init_edges.end());
  std::sort(split.iter_edges.begin(), split.iter_edges.end());
  return split;
}

}  // namespace advtopk
