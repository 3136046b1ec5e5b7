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

// Converse-bound and sample-complexity arithmetic. All logarithms are
// natural. Order-wise statements hide constants; every such constant is an
// explicit field defaulting to 1, so outputs hold "up to constants".

#ifndef ADVTOPK_BOUNDS_H_
#define ADVTOPK_BOUNDS_H_

namespace advtopk {

struct BoundConstants {
  double C_I = 1.0;        // mutual-information bound prefactor
  double C_known = 1.0;    // known-eta scaling prefactor
  double C_unknown = 1.0;  // unknown-eta scaling prefactor
};

struct BoundQuery {
  int n = 1000;
  int K = 10;
  double p = 0.0;
  double L = 0.0;
  double eta = 1.0;
  double delta_K = 0.0;
  BoundConstants constants;

  // Throws ParameterError unless 1 <= K < n, p in (0, 1], eta in (1/2, 1],
  // delta_K in [0, 1], L >= 0.
  void Validate() const;
};

// a log(a / b) + (1 - a) log((1 - a) / (1 - b)) with 0 log 0 = 0. Returns
// +infinity when b is 0 or 1 and a != b.
double BinaryKl(double a, double b);

// (a - b)^2 / b + (a - b)^2 / (1 - b); +infinity in the same cases as BinaryKl.
double BinaryChi2(double a, double b);

struct MixtureDivergence {
  double kl = 0.0;
  // (2 eta - 1)^2 (a - b)^2 / (((2 eta - 1) b + 1 - eta)(eta - (2 eta - 1) b))
  double chi2_bound = 0.0;
};

// Divergence between the mixed Bernoulli laws of the pairs (w_i, w_j) and
// (w_pi, w_pj), with a = w_i / (w_i + w_j) and b = w_pi / (w_pi + w_pj).
MixtureDivergence ComputeMixtureDivergence(double w_i, double w_j, double w_pi,
                                           double w_pj, double eta);

struct FanoBound {
  double mutual_information = 0.0;  // C_I p n L (2 eta - 1)^2 delta_K^2
  double bound = 0.0;               // lower bound on the error probability
};

// max(0, 1 - I / log(n / 2) - 1 / log(n / 2)). Requires n > 4.
FanoBound FanoLowerBound(const BoundQuery& q);

// Smallest L at which the Fano bound drops to `target`, found by bisection on
// the bound itself. Ignores q.L. +infinity if the information term is zero.
double FanoThresholdL(const BoundQuery& q, double target = 0.5);

enum class Regime { kKnownEta, kUnknownEta };

// C n log n / ((2 eta - 1)^2 delta^2) or C n log^2 n / ((2 eta - 1)^4 delta^4);
// +infinity for delta_K = 0.
double SampleComplexityScaling(const BoundQuery& q, Regime regime);

}  // namespace advtopk

#endif  // ADVTOPK_BOUNDS_H_
