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

#include "advtopk/spectral_ranking.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "advtopk/errors.h"

namespace advtopk {

ShiftedMeans ShiftMeans(const ObservationBatch& batch,
                        const MixtureParams& params) {
  const double eta = params.eta();
  if (!(eta > 0.5)) {
    throw DegenerateMixtureError("shifting requires eta > 1/2");
  }
  ShiftedMeans out;
  out.edges.assign(batch.edges().begin(), batch.edges().end());
  out.values.reserve(batch.num_edges());
  const double scale = 2.0 * eta - 1.0;
  for (double y : batch.means()) {
    double shifted = (y - (1.0 - eta)) / scale;
    if (shifted < 0.0 || shifted > 1.0) {
      shifted = std::clamp(shifted, 0.0, 1.0);
      ++out.clamped;
    }
    out.values.push_back(shifted);
  }
  return out;
}

TransitionMatrix::TransitionMatrix(SparseRows entries, int d_max,
                                   int clamped_entries)
    : entries_(std::move(entries)),
      d_max_(d_max),
      clamped_entries_(clamped_entries) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ParameterError("transition matrix must be square and non-empty");
  }
  entries_.makeCompressed();
  for (int r = 0; r < entries_.outerSize(); ++r) {
    double sum = 0.0;
    for (SparseRows::InnerIterator it(entries_, r); it; ++it) {
      if (it.value() < 0.0) {
        throw ParameterError("negative transition probability in row " +
                             std::to_string(r));
      }
      sum += it.value();
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ParameterError("row " + std::to_string(r) + " sums to " +
                           std::to_string(sum));
    }
  }
}

TransitionMatrix TransitionMatrix::FromDense(const Eigen::MatrixXd& dense) {
  SparseRows sparse = dense.sparseView();
  return TransitionMatrix(std::move(sparse), 0);
}

void TransitionMatrix::WriteCoordinateText(std::ostream& os) const {
  for (int r = 0; r < entries_.outerSize(); ++r) {
    for (SparseRows::InnerIterator it(entries_, r); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

TransitionMatrix BuildTransitionMatrix(const ShiftedMeans& shifted,
                                       const ComparisonGraph& g) {
  if (g.num_edges() == 0) {
    throw DegenerateInputError("transition matrix needs at least one edge");
  }
  if (!std::equal(shifted.edges.begin(), shifted.edges.end(),
                  g.edges().begin(), g.edges().end())) {
    throw ParameterError("shifted means must cover exactly the graph edges");
  }
  const int n = g.n();
  const int d_max = g.MaxDegree();
  const double inv_d = 1.0 / d_max;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * shifted.edges.size() + n);
  std::vector<double> outflow(n, 0.0);
  for (std::size_t k = 0; k < shifted.edges.size(); ++k) {
    const auto [i, j] = shifted.edges[k];
    const double i_beats_j = shifted.values[k];
    const double j_beats_i = 1.0 - i_beats_j;
    // Move toward the winner.
    triplets.emplace_back(i, j, j_beats_i * inv_d);
    triplets.emplace_back(j, i, i_beats_j * inv_d);
    outflow[i] += j_beats_i * inv_d;
    outflow[j] += i_beats_j * inv_d;
  }
  for (int i = 0; i < n; ++i) {
    // max() guards the last ulp; the row then sums to 1 up to rounding.
    triplets.emplace_back(i, i, std::max(0.0, 1.0 - outflow[i]));
  }
  TransitionMatrix::SparseRows P(n, n);
  P.setFromTriplets(triplets.begin(), triplets.end());
  return TransitionMatrix(std::move(P), d_max, shifted.clamped);
}

StationaryEstimate StationaryDistribution(const TransitionMatrix& P,
                                          double tol, int max_iters) {
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
  const int n = P.n();
  const Eigen::SparseMatrix<double> Pt = P.entries().transpose();
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd next(n);

  StationaryEstimate est;
  for (int iter = 0;; ++iter) {
    next.noalias() = Pt * pi;
    est.residual = (next - pi).lpNorm<1>();
    est.iterations_used = iter;
    if (est.residual < tol) {
      est.converged = true;
      break;
    }
    if (iter >= max_iters) break;
    pi = next / next.sum();
  }
  pi /= pi.sum();
  est.distribution.assign(pi.data(), pi.data() + n);
  return est;
}

RankCentralityResult RankCentrality(const ObservationBatch& batch,
                                    const ComparisonGraph& g,
                                    const MixtureParams& params,
                                    ScoreRange range, double tol) {
  range.Validate();
  batch.CheckMatches(g);
  const ShiftedMeans shifted = ShiftMeans(batch, params);
  const TransitionMatrix P = BuildTransitionMatrix(shifted, g);
  StationaryEstimate stationary = StationaryDistribution(P, tol);

  const double top = *std::max_element(stationary.distribution.begin(),
                                       stationary.distribution.end());
  std::vector<double> scores(stationary.distribution.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = std::clamp(stationary.distribution[i] * (range.w_max / top),
                           range.w_min, range.w_max);
  }
  return RankCentralityResult{
      .scores = ScoreVector(std::move(scores), range),
      .stationary = std::move(stationary),
      .reducible = !g.IsConnected(),
      .clamped_means = shifted.clamped,
  };
}

}  // namespace advtopk
