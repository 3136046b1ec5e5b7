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

#include "advtopk/eta_estimation.h"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "advtopk/errors.h"
#include "advtopk/random.h"

namespace advtopk {
namespace {

constexpr std::uint64_t kWorkerStream = 5;
constexpr double kRankOneRatio = 1e-10;

struct TopTwo {
  double s1 = 0.0;
  double s2 = 0.0;
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
};

// Two largest eigenpairs of a symmetric matrix (by value, or by magnitude).
TopTwo TopEigenpairs(const Eigen::MatrixXd& M, bool by_magnitude = false) {
  if (M.rows() < 2) {
    throw DegenerateInputError("moment matrix needs at least two coordinates");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success) {
    throw ConditioningError("eigendecomposition of M2 failed");
  }
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const int d = static_cast<int>(vals.size());
  std::vector<int> order(d);
  for (int k = 0; k < d; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return by_magnitude ? std::abs(vals[a]) > std::abs(vals[b])
                        : vals[a] > vals[b];
  });
  TopTwo top;
  top.s1 = vals[order[0]];
  top.s2 = vals[order[1]];
  top.u1 = solver.eigenvectors().col(order[0]);
  top.u2 = solver.eigenvectors().col(order[1]);
  return top;
}

double BlockIncoherence(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) {
  const int edges = static_cast<int>(u1.size()) / 2;
  double worst = 0.0;
  for (int k = 0; k < edges; ++k) {
    Eigen::Matrix2d block;
    block << u1[2 * k], u2[2 * k], u1[2 * k + 1], u2[2 * k + 1];
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(block);
    worst = std::max(worst, svd.singularValues()[0]);
  }
  return worst * std::sqrt(edges / 2.0);
}

double ClampEta(double eta, bool& clamped) {
  const double floor = 0.5 + kEtaFloorMargin;
  if (!(eta >= floor)) {
    clamped = true;
    return floor;
  }
  return std::min(eta, 1.0);
}

// Tensor-vector products for a dense r x r x r tensor.
double Apply3(const std::vector<double>& T, int r, const Eigen::VectorXd& u) {
  double s = 0.0;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c) s += T[(a * r + b) * r + c] * u[a] * u[b] * u[c];
  return s;
}

Eigen::VectorXd Apply2(const std::vector<double>& T, int r,
                       const Eigen::VectorXd& u) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c) v[a] += T[(a * r + b) * r + c] * u[b] * u[c];
  return v;
}

struct Eigenpair {
  double lambda = 0.0;
  Eigen::VectorXd u;
};

// Robust tensor power method on a symmetric r x r x r tensor: best of several
// random starts, ranked by T(u, u, u).
Eigenpair TensorPower(const std::vector<double>& T, int r,
                      const TensorPowerConfig& cfg, std::uint64_t key) {
  CounterRng rng(key);
  Eigenpair best;
  best.lambda = -std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Eigen::VectorXd u(r);
    for (int a = 0; a < r; ++a) u[a] = rng.Uniform() - 0.5;
    if (u.norm() == 0.0) u[0] = 1.0;
    u.normalize();
    for (int it = 0; it < cfg.iterations; ++it) {
      Eigen::VectorXd next = Apply2(T, r, u);
      const double norm = next.norm();
      if (norm == 0.0) break;
      next /= norm;
      const double step = (next - u).norm();
      u = std::move(next);
      if (step < cfg.tol) break;
    }
    const double lambda = Apply3(T, r, u);
    if (lambda > best.lambda) best = {lambda, u};
  }
  // Polish the winner.
  for (int it = 0; it < cfg.iterations; ++it) {
    Eigen::VectorXd next = Apply2(T, r, best.u);
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double step = (next - best.u).norm();
    best.u = std::move(next);
    if (step < cfg.tol) break;
  }
  best.lambda = Apply3(T, r, best.u);
  return best;
}

}  // namespace

void SymmetricTensor::SymmetrizeFromSorted() {
  for (int a = 0; a < d_; ++a) {
    for (int b = a; b < d_; ++b) {
      for (int c = b; c < d_; ++c) {
        const double v = at(a, b, c);
        at(a, c, b) = v;
        at(b, a, c) = v;
        at(b, c, a) = v;
        at(c, a, b) = v;
        at(c, b, a) = v;
      }
    }
  }
}

std::vector<double> SymmetricTensor::Contract(const Eigen::MatrixXd& W) const {
  const int r = static_cast<int>(W.cols());
  if (W.rows() != d_) throw ParameterError("whitening matrix has wrong rows");
  // A(a, b, z) = sum_c T(a, b, c) W(c, z)
  std::vector<double> A(std::size_t(d_) * d_ * r, 0.0);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b)
      for (int c = 0; c < d_; ++c) {
        const double t = (*this)(a, b, c);
        if (t == 0.0) continue;
        for (int z = 0; z < r; ++z) A[(std::size_t(a) * d_ + b) * r + z] += t * W(c, z);
      }
  // B(a, y, z) = sum_b W(b, y) A(a, b, z)
  std::vector<double> B(std::size_t(d_) * r * r, 0.0);
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b)
      for (int y = 0; y < r; ++y)
        for (int z = 0; z < r; ++z)
          B[(std::size_t(a) * r + y) * r + z] +=
              W(b, y) * A[(std::size_t(a) * d_ + b) * r + z];
  std::vector<double> out(std::size_t(r) * r * r, 0.0);
  for (int a = 0; a < d_; ++a)
    for (int x = 0; x < r; ++x)
      for (int y = 0; y < r; ++y)
        for (int z = 0; z < r; ++z)
          out[(x * r + y) * r + z] += W(a, x) * B[(std::size_t(a) * r + y) * r + z];
  return out;
}

DistributionVectors BuildDistributionVectors(const ScoreVector& w,
                                             const ComparisonGraph& g) {
  if (g.num_edges() == 0) {
    throw DegenerateInputError("distribution vectors need at least one edge");
  }
  if (g.n() > w.size()) {
    throw ParameterError("graph has more vertices than the score vector");
  }
  DistributionVectors dv;
  const int d = 2 * static_cast<int>(g.num_edges());
  dv.pi0.resize(d);
  dv.edge_order.assign(g.edges().begin(), g.edges().end());
  for (std::size_t k = 0; k < dv.edge_order.size(); ++k) {
    const Edge& e = dv.edge_order[k];
    const double total = w[e.i] + w[e.j];
    dv.pi0[2 * k] = w[e.i] / total;
    dv.pi0[2 * k + 1] = w[e.j] / total;
  }
  dv.pi1 = Eigen::VectorXd::Ones(d) - dv.pi0;
  dv.degenerate = (dv.pi0 - dv.pi1).cwiseAbs().maxCoeff() == 0.0;
  return dv;
}

MomentPair ExactMoments(const DistributionVectors& dv, double eta,
                        bool with_m3, int tensor_cap) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ParameterError("mixture weight must lie in [0, 1]");
  }
  const int d = dv.dim();
  MomentPair m;
  m.source = MomentSource::kExact;
  m.num_edges = d / 2;
  m.M2.resize(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      m.M2(a, b) = eta * dv.pi0[a] * dv.pi0[b] +
                   (1.0 - eta) * dv.pi1[a] * dv.pi1[b];
      m.M2(b, a) = m.M2(a, b);
    }
  }
  if (with_m3) {
    if (d > tensor_cap) {
      throw CapacityError("third moment has " + std::to_string(d) +
                          " coordinates, above the cap of " +
                          std::to_string(tensor_cap));
    }
    SymmetricTensor T(d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          T.at(a, b, c) = eta * dv.pi0[a] * dv.pi0[b] * dv.pi0[c] +
                          (1.0 - eta) * dv.pi1[a] * dv.pi1[b] * dv.pi1[c];
    m.M3 = std::move(T);
  }
  return m;
}

WorkerResponses::WorkerResponses(std::vector<Edge> edges,
                                 std::vector<std::vector<std::uint8_t>> rows)
    : edges_(std::move(edges)), rows_(std::move(rows)) {
  const std::size_t d = 2 * edges_.size();
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    if (rows_[u].size() != d) {
      throw ParameterError("worker " + std::to_string(u) + " has " +
                           std::to_string(rows_[u].size()) +
                           " columns, expected " + std::to_string(d));
    }
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const int a = rows_[u][2 * k];
      const int b = rows_[u][2 * k + 1];
      if (a > 1 || b > 1 || a + b != 1) {
        throw ParameterError("worker " + std::to_string(u) +
                             " is not one-hot on edge " + std::to_string(k));
      }
    }
  }
}

WorkerResponses SampleWorkerResponses(const ScoreVector& w,
                                      const ComparisonGraph& g, double eta,
                                      int num_workers, std::uint64_t seed) {
  const MixtureParams params(eta);
  if (num_workers < 1) throw ParameterError("need at least one worker");
  const DistributionVectors dv = BuildDistributionVectors(w, g);
  const std::size_t edges = g.num_edges();
  std::vector<std::vector<std::uint8_t>> rows(num_workers);
  for (int u = 0; u < num_workers; ++u) {
    CounterRng rng(DeriveSeed(seed, {kWorkerStream, std::uint64_t(u)}));
    const bool faithful = rng.Bernoulli(params.eta());
    auto& row = rows[u];
    row.assign(2 * edges, 0);
    for (std::size_t k = 0; k < edges; ++k) {
      const double q = faithful ? dv.pi0[2 * k] : dv.pi1[2 * k];
      if (rng.Bernoulli(q)) {
        row[2 * k] = 1;
      } else {
        row[2 * k + 1] = 1;
      }
    }
  }
  return WorkerResponses(dv.edge_order, std::move(rows));
}

ObservationBatch ToObservationBatch(const WorkerResponses& wr) {
  if (wr.num_workers() < 1) throw ParameterError("no worker responses");
  std::vector<std::int64_t> wins(wr.edges().size(), 0);
  for (int u = 0; u < wr.num_workers(); ++u) {
    const auto row = wr.row(u);
    for (std::size_t k = 0; k < wins.size(); ++k) wins[k] += row[2 * k];
  }
  return ObservationBatch::FromCounts(
      std::vector<Edge>(wr.edges().begin(), wr.edges().end()), std::move(wins),
      wr.num_workers());
}

RawMoments AccumulateRawMoments(const WorkerResponses& wr, int begin, int end,
                                bool with_m3) {
  if (begin < 0 || end > wr.num_workers() || begin >= end) {
    throw ParameterError("empty worker range");
  }
  const int d = wr.dim();
  const int edges = d / 2;
  RawMoments raw;
  raw.num_edges = edges;
  raw.m1 = Eigen::VectorXd::Zero(d);
  raw.m2 = Eigen::MatrixXd::Zero(d, d);
  if (with_m3) raw.m3.emplace(d);
  // Each row has exactly one active coordinate per edge, so only the active
  // index list needs to be visited.
  std::vector<int> active(edges);
  for (int u = begin; u < end; ++u) {
    const auto row = wr.row(u);
    for (int k = 0; k < edges; ++k) active[k] = row[2 * k] ? 2 * k : 2 * k + 1;
    for (int x = 0; x < edges; ++x) {
      const int a = active[x];
      raw.m1[a] += 1.0;
      for (int y = x; y < edges; ++y) {
        const int b = active[y];
        raw.m2(a, b) += 1.0;
        if (!with_m3) continue;
        for (int z = y; z < edges; ++z) raw.m3->at(a, b, active[z]) += 1.0;
      }
    }
  }
  const double inv = 1.0 / (end - begin);
  raw.m1 *= inv;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      raw.m2(a, b) *= inv;
      raw.m2(b, a) = raw.m2(a, b);
    }
  }
  if (with_m3) {
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        for (int c = b; c < d; ++c) raw.m3->at(a, b, c) *= inv;
    raw.m3->SymmetrizeFromSorted();
  }
  return raw;
}

MomentPair CorrectRawMoments(const RawMoments& raw) {
  const int edges = raw.num_edges;
  const int d = 2 * edges;
  if (edges < 2) {
    throw ConditioningError("moment correction needs at least two edges");
  }
  if (raw.m1.size() != d || raw.m2.rows() != d || raw.m2.cols() != d) {
    throw ParameterError("raw moments have inconsistent sizes");
  }
  constexpr std::array<double, 2> kSign = {1.0, -1.0};

  // In s_k = x_{2k} - x_{2k+1} coordinates the first moment is
  // (2 eta - 1) mu_k and cross-edge second moments are mu_k mu_l.
  Eigen::VectorXd mu(edges);
  for (int k = 0; k < edges; ++k) mu[k] = raw.m1[2 * k] - raw.m1[2 * k + 1];
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < edges; ++k) {
    for (int l = 0; l < edges; ++l) {
      if (k == l) continue;
      double g = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          g += kSign[i] * kSign[j] * raw.m2(2 * k + i, 2 * l + j);
      num += g * mu[k] * mu[l];
      den += mu[k] * mu[k] * mu[l] * mu[l];
    }
  }
  if (!(den > 0.0)) {
    throw ConditioningError("first moments vanish; cannot refit the diagonal");
  }
  // 1 / (2 eta - 1)^2, which is at least 1.
  const double inv_g2 = std::max(1.0, num / den);

  MomentPair m;
  m.source = MomentSource::kEmpirical;
  m.num_edges = edges;
  m.M2 = raw.m2;
  for (int k = 0; k < edges; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        m.M2(2 * k + i, 2 * k + j) =
            0.25 * (1.0 + kSign[i] * kSign[j] * mu[k] * mu[k] * inv_g2 +
                    (kSign[i] + kSign[j]) * mu[k]);
      }
    }
  }
  if (raw.m3) {
    SymmetricTensor T = *raw.m3;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int c = 0; c < d; ++c) {
          const int ka = a / 2, kb = b / 2, kc = c / 2;
          if (ka != kb && kb != kc && ka != kc) continue;
          const double sa = kSign[a % 2] * mu[ka];
          const double sb = kSign[b % 2] * mu[kb];
          const double sc = kSign[c % 2] * mu[kc];
          T.at(a, b, c) =
              0.125 * (1.0 + sa + sb + sc +
                       inv_g2 * (sa * sb + sa * sc + sb * sc + sa * sb * sc));
        }
      }
    }
    m.M3 = std::move(T);
  }
  return m;
}

MomentPair EmpiricalMoments(const WorkerResponses& wr, bool with_m3,
                            int tensor_cap) {
  const int workers = wr.num_workers();
  if (workers < 2) {
    throw CapacityError("need at least two workers to split the sample");
  }
  if (with_m3 && wr.dim() > tensor_cap) {
    throw CapacityError("third moment has " + std::to_string(wr.dim()) +
                        " coordinates, above the cap of " +
                        std::to_string(tensor_cap));
  }
  const int half = workers / 2;
  MomentPair m = CorrectRawMoments(AccumulateRawMoments(wr, 0, half, false));
  if (with_m3) {
    m.M3 = CorrectRawMoments(AccumulateRawMoments(wr, half, workers, true)).M3;
  }
  return m;
}

DistributionNorms NormsOf(const DistributionVectors& dv) {
  return {dv.pi0.squaredNorm(), dv.pi0.dot(dv.pi1)};
}

EtaEstimate EstimateEtaEigen(const MomentPair& m,
                             std::optional<DistributionNorms> norms) {
  const TopTwo top = TopEigenpairs(m.M2);
  if (!(top.s1 > 0.0)) throw ConditioningError("M2 has no positive eigenvalue");
  EtaEstimate est;
  est.method = EtaMethod::kEigenQuadratic;
  est.sigma1 = top.s1;
  est.sigma2 = top.s2;
  est.mu = BlockIncoherence(top.u1, top.u2);

  if (top.s2 <= kRankOneRatio * top.s1) {
    // Rank one: either eta = 1 or pi0 = pi1 (all pairs tied).
    bool tied;
    if (norms) {
      tied = norms->norm_sq - norms->cross <= 1e-12 * norms->norm_sq;
    } else {
      const Eigen::VectorXd v = std::sqrt(top.s1) * top.u1.cwiseAbs();
      tied = (v.array() - 0.5).abs().maxCoeff() <= 1e-8;
    }
    if (tied) {
      throw DegenerateMixtureError(
          "pi0 equals pi1; the mixture weight is unidentifiable");
    }
    est.eta_hat = 1.0;
    est.degenerate = true;
    return est;
  }

  const double N = norms ? norms->norm_sq : top.s1 + top.s2;
  const double c = norms ? norms->cross : m.num_edges - N;
  const double gap = N * N - c * c;
  if (!(N - c > 1e-12 * N) || !(gap > 0.0)) {
    throw DegenerateMixtureError("||pi0||^2 - <pi0, pi1> vanishes");
  }
  // Eigenvalues of diag(eta, 1 - eta) [[N, c], [c, N]]: sum N, product
  // eta (1 - eta) (N^2 - c^2).
  const double product = std::min(0.25, top.s1 * top.s2 / gap);
  const double raw_eta = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - 4.0 * product)));
  est.eta_hat = ClampEta(raw_eta, est.clamped);

  // Eigenvectors are pi0 + b pi1 with eta c b^2 + (2 eta - 1) N b -
  // (1 - eta) c = 0, and eigenvalue eta (N + b c).
  const double eta = est.eta_hat;
  std::vector<double> sigmas;
  const double qa = eta * c;
  const double qb = (2.0 * eta - 1.0) * N;
  const double qc = -(1.0 - eta) * c;
  if (std::abs(qa) > 1e-300) {
    const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
    for (double b : {(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)}) {
      sigmas.push_back(eta * (N + b * c));
    }
  } else {
    sigmas = {eta * N, (1.0 - eta) * N};
  }
  auto nearest = [&](double s) {
    double best = std::numeric_limits<double>::infinity();
    for (double candidate : sigmas) best = std::min(best, std::abs(s - candidate));
    return best;
  };
  est.residual = std::max(nearest(top.s1), nearest(top.s2));
  return est;
}

EtaEstimate EstimateEtaTensor(const MomentPair& m,
                              const TensorPowerConfig& cfg) {
  if (!m.M3) throw ParameterError("tensor route needs the third moment");
  if (m.M3->dim() != m.dim()) {
    throw ParameterError("M2 and M3 sizes differ");
  }
  if (cfg.restarts < 1 || cfg.iterations < 1 || !(cfg.tol > 0.0)) {
    throw ParameterError("invalid tensor power configuration");
  }
  const TopTwo top = TopEigenpairs(m.M2);
  if (!(top.s1 > 0.0)) {
    throw ConditioningError("M2 has no positive eigenvalue; cannot whiten");
  }
  if (top.s2 < -1e-9 * top.s1) {
    throw ConditioningError("M2 is not positive semidefinite; cannot whiten");
  }
  EtaEstimate est;
  est.method = EtaMethod::kTensorPower;
  est.sigma1 = top.s1;
  est.sigma2 = top.s2;
  est.mu = BlockIncoherence(top.u1, top.u2);

  const int r = top.s2 > kRankOneRatio * top.s1 ? 2 : 1;
  Eigen::MatrixXd W(m.dim(), r);
  W.col(0) = top.u1 / std::sqrt(top.s1);
  if (r == 2) W.col(1) = top.u2 / std::sqrt(top.s2);
  const std::vector<double> T = m.M3->Contract(W);

  if (r == 1) {
    // Whitened tensor is the scalar eta^{-1/2}.
    est.lambda1 = std::abs(T[0]);
    if (!(est.lambda1 > 0.0)) {
      throw ConditioningError("whitened third moment vanishes");
    }
    est.eta_hat = std::min(1.0, 1.0 / (est.lambda1 * est.lambda1));
    est.degenerate = true;
    return est;
  }

  const Eigenpair first = TensorPower(T, r, cfg, cfg.seed);
  std::vector<double> deflated = T;
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int c = 0; c < r; ++c)
        deflated[(a * r + b) * r + c] -=
            first.lambda * first.u[a] * first.u[b] * first.u[c];
  const Eigenpair second =
      TensorPower(deflated, r, cfg, DeriveSeed(cfg.seed, {1}));

  const double lambda1 = std::max(first.lambda, second.lambda);
  const double lambda2 = std::min(first.lambda, second.lambda);
  if (!(lambda1 > 0.0)) {
    throw ConditioningError("whitened tensor has no positive eigenvalue");
  }
  est.lambda1 = lambda1;
  // The larger eigenvalue belongs to the smaller mixture component.
  const double weight = 1.0 / (lambda1 * lambda1);
  est.eta_hat = ClampEta(std::max(weight, 1.0 - weight), est.clamped);
  // Component weights should sum to one.
  est.residual = lambda2 > 0.0
                     ? std::abs(weight + 1.0 / (lambda2 * lambda2) - 1.0)
                     : std::numeric_limits<double>::infinity();
  return est;
}

MomentDiagnostics ComputeMomentDiagnostics(const MomentPair& m) {
  const TopTwo top = TopEigenpairs(m.M2, /*by_magnitude=*/true);
  return {std::abs(top.s1), std::abs(top.s2), BlockIncoherence(top.u1, top.u2)};
}

std::int64_t RequiredLForEta(double epsilon, int n, double delta, double C_L) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("delta must lie in (0, 1)");
  }
  if (n < 1) throw ParameterError("n must be positive");
  if (!(C_L > 0.0)) throw ParameterError("C_L must be positive");
  return static_cast<std::int64_t>(
      std::ceil(C_L / (epsilon * epsilon) * std::log(n / delta)));
}

}  // namespace advtopk
