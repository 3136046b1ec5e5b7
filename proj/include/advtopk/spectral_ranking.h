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

// Rank Centrality on shifted pairwise means.
//
// Under the mixture, the per-edge mean converges to
//   eta * w_i / (w_i + w_j) + (1 - eta) * w_j / (w_i + w_j),
// which is affine in the BTL probability. Undoing the affine map gives a
// statistic whose limit is w_i / (w_i + w_j); a random walk that moves from i
// to j at rate proportional to "j beats i" then has stationary distribution
// proportional to w.

#ifndef ADVTOPK_SPECTRAL_RANKING_H_
#define ADVTOPK_SPECTRAL_RANKING_H_

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <ostream>
#include <vector>

#include "advtopk/core_model.h"

namespace advtopk {

// Shifted means, oriented like the batch: values[k] estimates
// P(edges[k].i beats edges[k].j) under plain BTL.
struct ShiftedMeans {
  std::vector<Edge> edges;
  std::vector<double> values;
  // Number of edges whose raw shifted value left [0, 1] and was clamped.
  int clamped = 0;
};

// (Y - (1 - eta)) / (2 eta - 1), clamped to [0, 1].
ShiftedMeans ShiftMeans(const ObservationBatch& batch,
                        const MixtureParams& params);

class TransitionMatrix {
 public:
  using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  // Validates non-negativity and unit row sums (within 1e-12).
  TransitionMatrix(SparseRows entries, int d_max, int clamped_entries = 0);

  // Dense row-stochastic input, mainly for oracle comparisons.
  static TransitionMatrix FromDense(const Eigen::MatrixXd& dense);

  int n() const { return static_cast<int>(entries_.rows()); }
  int d_max() const { return d_max_; }
  const SparseRows& entries() const { return entries_; }
  // True when shifted inputs were clamped before building the chain.
  bool clamped() const { return clamped_entries_ > 0; }
  int clamped_entries() const { return clamped_entries_; }

  Eigen::MatrixXd ToDense() const { return Eigen::MatrixXd(entries_); }

  // Coordinate text dump: one "row col value" line per stored entry.
  void WriteCoordinateText(std::ostream& os) const;

 private:
  SparseRows entries_;
  int d_max_;
  int clamped_entries_;
};

// p_ij = Y~_ji / d_max on edges, p_ii = 1 - sum_k Y~_ki / d_max, with d_max the
// largest degree in `g`. `shifted` must cover exactly g's edges.
TransitionMatrix BuildTransitionMatrix(const ShiftedMeans& shifted,
                                       const ComparisonGraph& g);

struct StationaryEstimate {
  std::vector<double> distribution;
  int iterations_used = 0;
  // ||pi P - pi||_1 of the returned distribution.
  double residual = 0.0;
  bool converged = false;
};

inline constexpr double kStationaryTolerance = 1e-10;
inline constexpr int kStationaryMaxIterations = 100000;

// Power iteration from the uniform distribution.
StationaryEstimate StationaryDistribution(
    const TransitionMatrix& P, double tol = kStationaryTolerance,
    int max_iters = kStationaryMaxIterations);

struct RankCentralityResult {
  // Stationary distribution rescaled so its largest entry equals w_max, then
  // clamped into the score range.
  ScoreVector scores;
  StationaryEstimate stationary;
  // A disconnected comparison graph makes the chain reducible; the returned
  // scores are then one of many stationary vectors.
  bool reducible = false;
  int clamped_means = 0;
};

RankCentralityResult RankCentrality(const ObservationBatch& batch,
                                    const ComparisonGraph& g,
                                    const MixtureParams& params,
                                    ScoreRange range,
                                    double tol = kStationaryTolerance);

}  // namespace advtopk

#endif  // ADVTOPK_SPECTRAL_RANKING_H_
