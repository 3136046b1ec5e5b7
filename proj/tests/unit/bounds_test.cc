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


#include <doctest.h>

#include <cmath>
#include <limits>

#include "advtopk/bounds.h"
#include "advtopk/core_model.h"
#include "advtopk/errors.h"
#include "advtopk/random.h"

namespace advtopk {
namespace {

BoundQuery PaperQuery() {
  BoundQuery q;
  q.n = 1000;
  q.K = 10;
  q.eta = 0.75;
  q.delta_K = 0.4;
  q.p = DefaultEdgeProbability(1000);
  return q;
}

TEST_CASE("binary KL") {
  CHECK(BinaryKl(0.3, 0.3) == 0.0);
  CHECK(BinaryKl(1.0, 0.5) == doctest::Approx(std::log(2.0)));
  CHECK(BinaryKl(0.0, 0.5) == doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(BinaryKl(0.5, 0.0)));
  CHECK(std::isinf(BinaryKl(0.5, 1.0)));
  CHECK_THROWS_AS(BinaryKl(1.5, 0.5), ParameterError);
}

TEST_CASE("binary chi-squared") {
  CHECK(BinaryChi2(0.4, 0.4) == 0.0);
  CHECK(BinaryChi2(0.6, 0.5) == doctest::Approx(0.04));
  CHECK(std::isinf(BinaryChi2(0.5, 1.0)));
}

TEST_CASE("Pinsker and chi-squared dominance on a grid") {
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double a = (i + 0.5) / 100;
      const double b = (j + 0.5) / 100;
      const double kl = BinaryKl(a, b);
      CHECK(kl >= 2 * (a - b) * (a - b) - 1e-15);
      CHECK(kl <= BinaryChi2(a, b) + 1e-15);
    }
  }
}

TEST_CASE("mixture divergence") {
  CHECK(ComputeMixtureDivergence(0.9, 0.6, 0.9, 0.6, 0.8).kl == 0.0);
  const double near = ComputeMixtureDivergence(1.0, 0.5, 0.5, 1.0, 0.5 + 1e-6).kl;
  CHECK(near < 1e-10);
  CounterRng rng(123);
  for (int k = 0; k < 1000; ++k) {
    const double wi = 0.1 + rng.Uniform(), wj = 0.1 + rng.Uniform();
    const double wpi = 0.1 + rng.Uniform(), wpj = 0.1 + rng.Uniform();
    const double eta = 0.5 + 0.5 * rng.Uniform() + 1e-9;
    const MixtureDivergence d =
        ComputeMixtureDivergence(wi, wj, wpi, wpj, std::min(eta, 1.0));
    CHECK(d.kl <= d.chi2_bound * (1 + 1e-12) + 1e-15);
    CHECK(d.kl >= 0.0);
  }
}

TEST_CASE("Fano bound with no samples") {
  BoundQuery q = PaperQuery();
  q.L = 0;
  const FanoBound f = FanoLowerBound(q);
  CHECK(f.mutual_information == 0.0);
  CHECK(f.bound == doctest::Approx(1 - 1 / std::log(500.0)));
}

TEST_CASE("Fano bound is in [0, 1] and non-increasing in L") {
  for (int n : {5, 50, 1000}) {
    for (double eta : {0.55, 0.75, 1.0}) {
      for (double dk : {0.0, 0.1, 0.4}) {
        BoundQuery q = PaperQuery();
        q.n = n;
        q.K = 2;
        q.eta = eta;
        q.delta_K = dk;
        q.p = 0.5;
        double prev = 2.0;
        for (double L : {0.0, 0.1, 1.0, 10.0, 100.0, 1e4}) {
          q.L = L;
          const double b = FanoLowerBound(q).bound;
          CHECK((b >= 0.0 && b <= 1.0));
          CHECK(b <= prev);
          prev = b;
        }
      }
    }
  }
}

TEST_CASE("Fano threshold matches the algebraic inversion") {
  const BoundQuery q = PaperQuery();
  const double log_m = std::log(500.0);
  const double info_per_L = q.p * q.n * 0.25 * 0.16;
  const double expected = (0.5 * log_m - 1) / info_per_L;
  const double L = FanoThresholdL(q, 0.5);
  CHECK(L == doctest::Approx(expected).epsilon(1e-10));
  CHECK(L == doctest::Approx(1.2710).epsilon(1e-3));
  BoundQuery at = q;
  at.L = L;
  CHECK(FanoLowerBound(at).bound == doctest::Approx(0.5));
  BoundQuery flat = q;
  flat.delta_K = 0;
  CHECK(std::isinf(FanoThresholdL(flat, 0.5)));
}

TEST_CASE("Fano bound needs n > 4") {
  BoundQuery q = PaperQuery();
  q.n = 4;
  q.K = 2;
  CHECK_THROWS_AS(FanoLowerBound(q), ParameterError);
}

TEST_CASE("sample complexity scaling") {
  const BoundQuery q = PaperQuery();
  CHECK(SampleComplexityScaling(q, Regime::kKnownEta) ==
        doctest::Approx(172694).epsilon(1e-5));
  const double ratio = SampleComplexityScaling(q, Regime::kUnknownEta) /
                       SampleComplexityScaling(q, Regime::kKnownEta);
  CHECK(ratio == doctest::Approx(std::log(1000.0) / (0.25 * 0.16)));
  BoundQuery flat = q;
  flat.delta_K = 0;
  CHECK(std::isinf(SampleComplexityScaling(flat, Regime::kKnownEta)));
}

TEST_CASE("invalid queries") {
  BoundQuery q = PaperQuery();
  q.eta = 0.5;
  CHECK_THROWS_AS(q.Validate(), ParameterError);
  q = PaperQuery();
  q.K = 1000;
  CHECK_THROWS_AS(q.Validate(), ParameterError);
  q = PaperQuery();
  q.L = -1;
  CHECK_THROWS_AS(q.Validate(), ParameterError);
}

}  // namespace
}  // namespace advtopk
