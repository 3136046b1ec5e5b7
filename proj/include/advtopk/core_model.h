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

// Statistical model for pairwise comparisons under a two-population
// Bradley-Terry-Luce mixture: latent scores, Erdos-Renyi comparison graphs,
// mixture-Bernoulli observations and the boundary separation metric.
//
// Items are indexed from 0. Ground-truth score vectors are stored in
// non-increasing order, so the true top-K set is always {0, ..., K-1}.

#ifndef ADVTOPK_CORE_MODEL_H_
#define ADVTOPK_CORE_MODEL_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace advtopk {

// Unordered item pair stored canonically with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Inclusive dynamic range [w_min, w_max] of preference scores.
struct ScoreRange {
  double w_min = 0.5;
  double w_max = 1.0;

  // Throws ParameterError unless 0 < w_min <= w_max.
  void Validate() const;
};

class ScoreVector {
 public:
  // Throws ParameterError if the range is invalid or an entry lies outside it.
  ScoreVector(std::vector<double> values, ScoreRange range);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const ScoreRange& range() const { return range_; }
  double w_min() const { return range_.w_min; }
  double w_max() const { return range_.w_max; }

  bool IsNonIncreasing() const;
  double MaxEntry() const;

 private:
  std::vector<double> values_;
  ScoreRange range_;
};

class ComparisonGraph {
 public:
  // Edges are canonicalized to i < j and sorted. Self-loops, duplicates and
  // out-of-range endpoints raise ParameterError. `p` is the edge probability
  // the graph was (nominally) drawn with.
  ComparisonGraph(int n, std::vector<Edge> edges, double p);

  int n() const { return n_; }
  double p() const { return p_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  // True when p <= log(n) / n, where ER graphs are typically disconnected.
  bool below_connectivity_threshold() const;

  std::vector<int> Degrees() const;
  int MaxDegree() const;
  bool IsConnected() const;

  // Subgraph on the same vertex set keeping the edges at `edge_indices`.
  ComparisonGraph Subgraph(std::span<const std::size_t> edge_indices) const;

  // Index of `e` in edges(), if present.
  std::optional<std::size_t> FindEdge(Edge e) const;

 private:
  int n_;
  std::vector<Edge> edges_;
  double p_;
};

// Faithful-population weight eta in (1/2, 1].
class MixtureParams {
 public:
  explicit MixtureParams(double eta);
  double eta() const { return eta_; }

  // Success probability of "i beats j" when item i has score wi and j has wj.
  double WinProbability(double wi, double wj) const;

 private:
  double eta_;
};

// Per-edge outcomes Y_ij^(l) (1 means the lower-index item i won) and their
// sufficient statistics. Raw outcomes are optional: Monte Carlo runs keep only
// win counts, and large-sample surrogates carry only means.
class ObservationBatch {
 public:
  static ObservationBatch FromSamples(
      std::vector<Edge> edges, std::vector<std::vector<std::uint8_t>> samples);
  static ObservationBatch FromCounts(std::vector<Edge> edges,
                                     std::vector<std::int64_t> wins,
                                     std::int64_t L);
  // Means in [0, 1] standing in for an L-sample batch (e.g. the L -> infinity
  // limit of a model).
  static ObservationBatch FromMeans(std::vector<Edge> edges,
                                    std::vector<double> means, std::int64_t L);

  std::int64_t L() const { return L_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  double mean(std::size_t k) const { return means_[k]; }
  std::span<const double> means() const { return means_; }
  bool has_samples() const { return !samples_.empty() || edges_.empty(); }
  std::span<const std::uint8_t> samples(std::size_t k) const {
    return samples_[k];
  }

  // Batch restricted to the edges at `edge_indices` (in that order).
  ObservationBatch Restrict(std::span<const std::size_t> edge_indices) const;

  // Throws ParameterError unless edges() matches the graph's edge list.
  void CheckMatches(const ComparisonGraph& g) const;

 private:
  ObservationBatch() = default;

  std::int64_t L_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> means_;
  std::vector<std::vector<std::uint8_t>> samples_;
};

// Random halving of the edge set. Entries are indices into the graph's edge
// list; init_edges has ceil(|E|/2) entries and iter_edges floor(|E|/2).
struct EdgeSplit {
  std::vector<std::size_t> init_edges;
  std::vector<std::size_t> iter_edges;
};

// n i.i.d. uniform scores on the range, sorted non-increasing.
ScoreVector GenerateScores(int n, ScoreRange range, std::uint64_t seed);

// Erdos-Renyi G(n, p).
ComparisonGraph GenerateErGraph(int n, double p, std::uint64_t seed);

// The edge probability 6 log(n) / n used throughout the experiments.
double DefaultEdgeProbability(int n);

// L mixture-Bernoulli draws per edge. Edge (i, j) uses its own stream keyed by
// (seed, i, j), so results do not depend on edge iteration order.
ObservationBatch SampleObservations(const ScoreVector& w,
                                    const ComparisonGraph& g,
                                    const MixtureParams& params, std::int64_t L,
                                    std::uint64_t seed,
                                    bool keep_samples = true);

// Per-edge means at L -> infinity: the exact mixture win probabilities.
ObservationBatch ExactObservations(const ScoreVector& w,
                                   const ComparisonGraph& g,
                                   const MixtureParams& params,
                                   std::int64_t nominal_L);

// (w_K - w_{K+1}) / max(w) for 1 <= K < n, with K counted from 1.
double DeltaK(const ScoreVector& w, int K);

EdgeSplit SplitEdges(const ComparisonGraph& g, std::uint64_t seed);

}  // namespace advtopk

#endif  // ADVTOPK_CORE_MODEL_H_
