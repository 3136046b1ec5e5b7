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

#include "advtopk/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "advtopk/errors.h"

namespace advtopk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckProbabilities(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
    throw ParameterError("probabilities must lie in [0, 1]");
  }
}

double XLogXOverY(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

void BoundQuery::Validate() const {
  if (n < 2 || K < 1 || K >= n) {
    throw ParameterError("need 1 <= K < n, got n=" + std::to_string(n) +
                         " K=" + std::to_string(K));
  }
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  if (!(eta > 0.5 && eta <= 1.0)) {
    throw ParameterError("eta must lie in (1/2, 1]");
  }
  if (!(delta_K >= 0.0 && delta_K <= 1.0)) {
    throw ParameterError("delta_K must lie in [0, 1]");
  }
  if (!(L >= 0.0)) throw ParameterError("L must be non-negative");
  if (!(constants.C_I > 0.0 && constants.C_known > 0.0 &&
        constants.C_unknown > 0.0)) {
    throw ParameterError("bound constants must be positive");
  }
}

double BinaryKl(double a, double b) {
  CheckProbabilities(a, b);
  if (a == b) return 0.0;
  if (b == 0.0 || b == 1.0) return kInf;
  return XLogXOverY(a, b) + XLogXOverY(1.0 - a, 1.0 - b);
}

double BinaryChi2(double a, double b) {
  CheckProbabilities(a, b);
  if (a == b) return 0.0;
  if (b == 0.0 || b == 1.0) return kInf;
  const double d2 = (a - b) * (a - b);
  return d2 / b + d2 / (1.0 - b);
}

MixtureDivergence ComputeMixtureDivergence(double w_i, double w_j, double w_pi,
                                           double w_pj, double eta) {
  if (!(w_i > 0.0 && w_j > 0.0 && w_pi > 0.0 && w_pj > 0.0)) {
    throw ParameterError("scores must be positive");
  }
  if (!(eta > 0.5 && eta <= 1.0)) {
    throw ParameterError("eta must lie in (1/2, 1]");
  }
  const double a = w_i / (w_i + w_j);
  const double b = w_pi / (w_pi + w_pj);
  const double slope = 2.0 * eta - 1.0;
  const double qa = slope * a + 1.0 - eta;
  const double qb = slope * b + 1.0 - eta;
  MixtureDivergence out;
  out.kl = BinaryKl(qa, qb);
  out.chi2_bound =
      slope * slope * (a - b) * (a - b) / (qb * (eta - slope * b));
  return out;
}

FanoBound FanoLowerBound(const BoundQuery& q) {
  q.Validate();
  if (q.n <= 4) {
    throw ParameterError("Fano bound needs n > 4");
  }
  const double slope = 2.0 * q.eta - 1.0;
  const double log_m = std::log(q.n / 2.0);
  FanoBound out;
  out.mutual_information = q.constants.C_I * q.p * q.n * q.L * slope * slope *
                           q.delta_K * q.delta_K;
  out.bound =
      std::max(0.0, 1.0 - out.mutual_information / log_m - 1.0 / log_m);
  return out;
}

double FanoThresholdL(const BoundQuery& q, double target) {
  BoundQuery probe = q;
  probe.L = 0.0;
  const double at_zero = FanoLowerBound(probe).bound;
  if (!(target >= 0.0 && target < 1.0)) {
    throw ParameterError("target must lie in [0, 1)");
  }
  if (at_zero <= target) return 0.0;
  const double slope = 2.0 * q.eta - 1.0;
  if (slope * q.delta_K == 0.0) return kInf;
  double lo = 0.0;
  double hi = 1.0;
  for (probe.L = hi; FanoLowerBound(probe).bound > target; probe.L = hi) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    probe.L = 0.5 * (lo + hi);
    if (FanoLowerBound(probe).bound > target) {
      lo = probe.L;
    } else {
      hi = probe.L;
    }
  }
  return hi;
}

double SampleComplexityScaling(const BoundQuery& q, Regime regime) {
  q.Validate();
  if (q.delta_K == 0.0) return kInf;
  const double log_n = std::log(static_cast<double>(q.n));
  const double s = (2.0 * q.eta - 1.0) * q.delta_K;
  if (regime == Regime::kKnownEta) {
    return q.constants.C_known * q.n * log_n / (s * s);
  }
  return q.constants.C_unknown * q.n * log_n * log_n / (s * s * s * s);
}

}  // namespace advtopk
