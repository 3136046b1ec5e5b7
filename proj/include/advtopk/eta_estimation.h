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

// Method-of-moments recovery of the mixture weight eta.
//
// Every edge (i, j) contributes two coordinates, "i beats j" and "j beats i".
// A faithful worker answers with probabilities pi0 = (w_i, w_j) / (w_i + w_j),
// an adversarial one with pi1 = 1 - pi0. Over workers,
//   M2 = eta pi0 pi0^T + (1 - eta) pi1 pi1^T,
//   M3 = eta pi0^{x3} + (1 - eta) pi1^{x3}.
// M2 has rank 2 and its two eigenvalues pin down eta once ||pi0||^2 and
// <pi0, pi1> are known (or recovered from the trace). Whitening M3 with M2
// gives a 2x2x2 orthogonally decomposable tensor with eigenvalues eta^{-1/2}
// and (1 - eta)^{-1/2}.
//
// Coordinates are laid out edge by edge in canonical edge order: 2k is
// "edges[k].i beats edges[k].j", 2k + 1 the reverse.

#ifndef ADVTOPK_ETA_ESTIMATION_H_
#define ADVTOPK_ETA_ESTIMATION_H_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "advtopk/core_model.h"

namespace advtopk {

struct DistributionVectors {
  Eigen::VectorXd pi0;
  Eigen::VectorXd pi1;
  std::vector<Edge> edge_order;
  // pi0 == pi1: every compared pair has equal scores, eta is unidentifiable.
  bool degenerate = false;

  int dim() const { return static_cast<int>(pi0.size()); }
};

DistributionVectors BuildDistributionVectors(const ScoreVector& w,
                                             const ComparisonGraph& g);

enum class MomentSource { kExact, kEmpirical };

inline constexpr int kDefaultTensorCap = 200;

// Dense symmetric third-order tensor of side d, stored row-major.
class SymmetricTensor {
 public:
  explicit SymmetricTensor(int d) : d_(d), data_(std::size_t(d) * d * d) {}

  int dim() const { return d_; }
  double operator()(int a, int b, int c) const {
    return data_[(std::size_t(a) * d_ + b) * d_ + c];
  }
  double& at(int a, int b, int c) {
    return data_[(std::size_t(a) * d_ + b) * d_ + c];
  }
  // Copies every a <= b <= c entry to its permutations.
  void SymmetrizeFromSorted();
  // T(W, W, W) for a d x r matrix W.
  std::vector<double> Contract(const Eigen::MatrixXd& W) const;

 private:
  int d_;
  std::vector<double> data_;
};

struct MomentPair {
  Eigen::MatrixXd M2;
  std::optional<SymmetricTensor> M3;
  MomentSource source = MomentSource::kExact;
  int num_edges = 0;

  int dim() const { return static_cast<int>(M2.rows()); }
};

// eta is accepted on [0, 1] so that mirrored mixtures can be built.
// with_m3 = false skips the tensor (and the size cap).
MomentPair ExactMoments(const DistributionVectors& dv, double eta,
                        bool with_m3 = true, int tensor_cap = kDefaultTensorCap);

// One latent type per worker; each worker answers every edge once.
class WorkerResponses {
 public:
  // rows: num_workers x 2|E| indicators. Throws ParameterError unless each
  // row is one-hot within every edge pair.
  WorkerResponses(std::vector<Edge> edges,
                  std::vector<std::vector<std::uint8_t>> rows);

  int num_workers() const { return static_cast<int>(rows_.size()); }
  int dim() const { return 2 * static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const std::uint8_t> row(int u) const { return rows_[u]; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint8_t>> rows_;
};

// Worker u is faithful with probability eta; its stream is keyed by (seed, u).
WorkerResponses SampleWorkerResponses(const ScoreVector& w,
                                      const ComparisonGraph& g, double eta,
                                      int num_workers, std::uint64_t seed);

// Per-edge tallies with L = num_workers, ready for the ranking pipeline.
ObservationBatch ToObservationBatch(const WorkerResponses& wr);

// Uncorrected sample averages over workers [begin, end).
struct RawMoments {
  Eigen::VectorXd m1;
  Eigen::MatrixXd m2;
  std::optional<SymmetricTensor> m3;
  int num_edges = 0;
};

RawMoments AccumulateRawMoments(const WorkerResponses& wr, int begin, int end,
                                bool with_m3);

// Replaces the entries that mix coordinates of one edge. Those are biased
// because a worker answers each edge once; they are refit from the rank-2
// structure. Throws ConditioningError when the refit is ill-posed.
MomentPair CorrectRawMoments(const RawMoments& raw);

// M2 from the first half of the workers, M3 from the second half.
MomentPair EmpiricalMoments(const WorkerResponses& wr, bool with_m3 = true,
                            int tensor_cap = kDefaultTensorCap);

enum class EtaMethod { kEigenQuadratic, kTensorPower };

struct EtaEstimate {
  double eta_hat = 1.0;
  EtaMethod method = EtaMethod::kEigenQuadratic;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double mu = 0.0;
  // Eigen route: mismatch between the eigenvalues and eta (||pi0||^2 + b c).
  // Tensor route: |lambda_1^{-2} + lambda_2^{-2} - 1|.
  double residual = 0.0;
  double lambda1 = 0.0;
  bool degenerate = false;  // rank-1 M2, eta_hat = 1
  bool clamped = false;     // raw estimate fell below 1/2 + kEtaFloorMargin
};

inline constexpr double kEtaFloorMargin = 1e-6;

struct DistributionNorms {
  double norm_sq = 0.0;  // ||pi0||^2
  double cross = 0.0;    // <pi0, pi1>
};

DistributionNorms NormsOf(const DistributionVectors& dv);

EtaEstimate EstimateEtaEigen(const MomentPair& m,
                             std::optional<DistributionNorms> norms = {});

struct TensorPowerConfig {
  int restarts = 10;
  int iterations = 100;
  double tol = 1e-10;
  std::uint64_t seed = 0x5eed;
};

EtaEstimate EstimateEtaTensor(const MomentPair& m,
                              const TensorPowerConfig& cfg = {});

struct MomentDiagnostics {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double mu = 0.0;
};

MomentDiagnostics ComputeMomentDiagnostics(const MomentPair& m);

// ceil((C_L / eps^2) log(n / delta)).
std::int64_t RequiredLForEta(double epsilon, int n, double delta,
                             double C_L = 1.0);

}  // namespace advtopk

#endif  // ADVTOPK_ETA_ESTIMATION_H_
