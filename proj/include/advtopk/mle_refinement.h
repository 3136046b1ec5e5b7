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

// Spectral initialization followed by thresholded coordinate-wise MLE.
//
// The edge set is halved at random. Rank Centrality on the first half gives
// w^(0). Each round t then computes, for every item, the maximizer of the
// mixture likelihood over the second half with the other scores held at
// w^(t), and adopts it only where it moves the score by more than xi_t. The
// threshold shrinks geometrically from the spectral stage's error level to
// the target error level. The K largest entries of the final vector are the
// answer.

#ifndef ADVTOPK_MLE_REFINEMENT_H_
#define ADVTOPK_MLE_REFINEMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "advtopk/core_model.h"

namespace advtopk {

enum class ThresholdMode {
  kKnownEta,      // xi_t: square-root error schedule
  kEstimatedEta,  // hat xi_t: fourth-root schedule for a plug-in eta estimate
};

struct RefinementConfig {
  int T = 1;
  double c = 1.0;
  double eta_for_threshold = 1.0;
  ThresholdMode mode = ThresholdMode::kKnownEta;
  int solver_grid = 64;
  double solver_tol = 1e-6;

  // T = ceil(log n), c = 1 and the given eta.
  static RefinementConfig Default(int n, double eta,
                                  ThresholdMode mode = ThresholdMode::kKnownEta);

  void Validate() const;
};

struct IterationRecord {
  int t = 0;
  int replaced = 0;
  // Largest |w_i^mle - w_i^(t)| over items with data, whether or not adopted.
  double max_change = 0.0;
  double threshold = 0.0;
};

struct RefinementTrace {
  std::vector<IterationRecord> per_iteration;
  std::vector<double> final_scores;
  // The init half was disconnected, so w^(0) was computed on all edges.
  bool init_fallback = false;
  // Even the full graph is disconnected; the ranking is not identifiable.
  bool disconnected = false;
  bool stationary_converged = true;
  int clamped_means = 0;
  int isolated_items = 0;

  // CSV with header t,replaced_count,max_change,threshold.
  void WriteCsv(std::ostream& os) const;
};

// Comparison data seen from one item: opponent and the fraction of wins.
struct Neighbor {
  int j = 0;
  double y = 0.0;
};

// Per-item neighbor lists built from the batch edges at `edge_indices`.
std::vector<std::vector<Neighbor>> BuildNeighborLists(
    const ObservationBatch& batch, std::span<const std::size_t> edge_indices,
    int n);

// (1/L) log-likelihood of score tau for one item given its neighbors' scores.
// Returns nullopt for an item without comparisons.
std::optional<double> PointwiseLogLikelihood(double tau,
                                             std::span<const Neighbor> data,
                                             std::span<const double> w,
                                             double eta);

// Same quantity for item i using every edge of `batch` that touches i.
std::optional<double> PointwiseLogLikelihood(double tau, const ScoreVector& w,
                                             int i,
                                             const ObservationBatch& batch,
                                             double eta);

// Maximizer of PointwiseLogLikelihood over the score range: coarse grid, then
// golden-section search around the best grid point. Ties go to the smaller
// tau. Returns `current` for an item without comparisons.
double CoordinateMle(std::span<const Neighbor> data, std::span<const double> w,
                     double current, double eta, ScoreRange range,
                     int solver_grid, double solver_tol);

double CoordinateMle(int i, const ScoreVector& w_current,
                     const ObservationBatch& batch, double eta,
                     const RefinementConfig& cfg);

double ThresholdKnown(int t, int n, double p, double L, double eta, double c);
double ThresholdEstimated(int t, int n, double p, double L, double eta_hat,
                          double c);

struct SpectralMleResult {
  // Indices of the K largest final scores, best first; ties broken by the
  // smaller index.
  std::vector<int> top_k;
  RefinementTrace trace;
};

SpectralMleResult SpectralMle(const ObservationBatch& batch,
                              const ComparisonGraph& g, double eta, int K,
                              const RefinementConfig& cfg, ScoreRange range,
                              std::uint64_t seed);

// Indices of the K largest entries, best first, ties to the smaller index.
std::vector<int> TopK(std::span<const double> scores, int K);

}  // namespace advtopk

#endif  // ADVTOPK_MLE_REFINEMENT_H_
