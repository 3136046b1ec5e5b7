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

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "advtopk/core_model.h"
#include "advtopk/errors.h"

namespace advtopk {
namespace {

double MeanOf(const ObservationBatch& b, std::size_t k) { return b.mean(k); }

TEST_CASE("degenerate range gives a constant vector") {
  const ScoreVector w = GenerateScores(5, {1.0, 1.0}, 7);
  for (double v : w.values()) CHECK(v == 1.0);
}

TEST_CASE("scores are sorted, in range and seed-determined") {
  const ScoreVector w = GenerateScores(1000, {0.5, 1.0}, 11);
  CHECK(w.size() == 1000);
  CHECK(w.IsNonIncreasing());
  for (double v : w.values()) CHECK((v >= 0.5 && v <= 1.0));
  const ScoreVector a = GenerateScores(10, {0.5, 1.0}, 42);
  const ScoreVector b = GenerateScores(10, {0.5, 1.0}, 42);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("invalid score range is a parameter error") {
  CHECK_THROWS_AS(GenerateScores(5, {0.0, 1.0}, 1), ParameterError);
  CHECK_THROWS_AS(GenerateScores(5, {2.0, 1.0}, 1), ParameterError);
  CHECK_THROWS_AS(GenerateScores(1, {0.5, 1.0}, 1), ParameterError);
}

TEST_CASE("p = 1 gives the complete graph") {
  const ComparisonGraph g = GenerateErGraph(4, 1.0, 3);
  CHECK(g.num_edges() == 6);
  CHECK(g.IsConnected());
}

TEST_CASE("ER edge count at the default density") {
  const int n = 1000;
  const double p = DefaultEdgeProbability(n);
  const double pairs = n * (n - 1) / 2.0;
  const double mean = pairs * p;
  CHECK(mean == doctest::Approx(20703).epsilon(1e-3));
  const double sd = std::sqrt(pairs * p * (1 - p));
  const ComparisonGraph g = GenerateErGraph(n, p, 99);
  CHECK(std::abs(static_cast<double>(g.num_edges()) - mean) < 4 * sd);
  CHECK_FALSE(g.below_connectivity_threshold());
}

TEST_CASE("single pair edge frequency over many seeds") {
  const int seeds = 100000;
  int hits = 0;
  for (int s = 0; s < seeds; ++s) hits += GenerateErGraph(2, 0.5, s).num_edges();
  CHECK(std::abs(hits / double(seeds) - 0.5) < 0.01);
}

TEST_CASE("sparse graph raises the connectivity warning") {
  const ComparisonGraph g = GenerateErGraph(100, 0.01, 5);
  CHECK(g.below_connectivity_threshold());
  CHECK_THROWS_AS(GenerateErGraph(10, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(GenerateErGraph(10, 1.5, 1), ParameterError);
}

TEST_CASE("graph construction canonicalizes and rejects bad edges") {
  const ComparisonGraph g(3, {{2, 0}, {1, 0}}, 0.5);
  REQUIRE(g.num_edges() == 2);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{0, 2});
  CHECK(g.FindEdge({0, 2}).value() == 1);
  CHECK_FALSE(g.FindEdge({1, 2}).has_value());
  CHECK_THROWS_AS(ComparisonGraph(3, {{1, 1}}, 0.5), ParameterError);
  CHECK_THROWS_AS(ComparisonGraph(3, {{0, 1}, {1, 0}}, 0.5), ParameterError);
  CHECK_THROWS_AS(ComparisonGraph(3, {{0, 3}}, 0.5), ParameterError);
}

TEST_CASE("mixture win probability") {
  const MixtureParams m(0.75);
  CHECK(m.WinProbability(0.7, 0.7) == 0.5);
  CHECK(m.WinProbability(3, 1) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(MixtureParams(0.6).WinProbability(1, 1) == 0.5);
  CHECK_THROWS_AS(MixtureParams(0.5), ParameterError);
  CHECK_THROWS_AS(MixtureParams(1.01), ParameterError);
}

void CheckSingleEdgeMean(double eta, double wi, double wj, double q) {
  const ScoreVector w({wi, wj}, {std::min(wi, wj), std::max(wi, wj)});
  const ComparisonGraph g(2, {{0, 1}}, 1.0);
  const std::int64_t L = 1000000;
  const ObservationBatch b = SampleObservations(w, g, MixtureParams(eta), L, 17,
                                                /*keep_samples=*/false);
  const double sigma = std::sqrt(q * (1 - q) / L);
  CHECK(std::abs(MeanOf(b, 0) - q) < 4 * sigma);
}

TEST_CASE("single edge empirical means at a million samples") {
  CheckSingleEdgeMean(1.0, 2, 1, 2.0 / 3.0);
  CheckSingleEdgeMean(0.75, 3, 1, 0.625);
}

TEST_CASE("empirical means converge on at least 99 percent of edges") {
  const ScoreVector w = GenerateScores(30, {0.5, 1.0}, 3);
  const ComparisonGraph g = GenerateErGraph(30, 0.3, 4);
  const MixtureParams params(0.8);
  const std::int64_t L = 1000000;
  const ObservationBatch b = SampleObservations(w, g, params, L, 5, false);
  int within = 0;
  for (std::size_t k = 0; k < b.num_edges(); ++k) {
    const Edge e = b.edges()[k];
    const double q = params.WinProbability(w[e.i], w[e.j]);
    within += std::abs(b.mean(k) - q) < 4 * std::sqrt(q * (1 - q) / L);
  }
  CHECK(within >= 0.99 * b.num_edges());
}

TEST_CASE("kept samples and counts agree and are seed-determined") {
  const ScoreVector w = GenerateScores(8, {0.5, 1.0}, 1);
  const ComparisonGraph g = GenerateErGraph(8, 0.6, 2);
  const MixtureParams params(0.7);
  const ObservationBatch a = SampleObservations(w, g, params, 50, 9, true);
  const ObservationBatch b = SampleObservations(w, g, params, 50, 9, false);
  REQUIRE(a.has_samples());
  for (std::size_t k = 0; k < a.num_edges(); ++k) {
    CHECK(a.mean(k) == b.mean(k));
    int wins = 0;
    for (auto y : a.samples(k)) wins += y;
    CHECK(a.mean(k) == doctest::Approx(wins / 50.0));
  }
}

TEST_CASE("delta_k") {
  const ScoreVector w({1, 0.8, 0.5, 0.4}, {0.4, 1});
  CHECK(DeltaK(w, 2) == doctest::Approx(0.3));
  CHECK(DeltaK(ScoreVector({0.7, 0.7, 0.7}, {0.5, 1}), 1) == 0.0);
  CHECK(DeltaK(ScoreVector({1, 0.6}, {0.5, 1}), 1) == doctest::Approx(0.4));
  CHECK_THROWS_AS(DeltaK(w, 0), ParameterError);
  CHECK_THROWS_AS(DeltaK(w, 4), ParameterError);
  // positive rescaling leaves it unchanged
  const ScoreVector w3({3, 2.4, 1.5, 1.2}, {1.2, 3});
  CHECK(DeltaK(w3, 2) == doctest::Approx(DeltaK(w, 2)));
}

TEST_CASE("edge split sizes and determinism") {
  const ComparisonGraph g6(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
                           1.0);
  const EdgeSplit s6 = SplitEdges(g6, 1);
  CHECK(s6.init_edges.size() == 3);
  CHECK(s6.iter_edges.size() == 3);

  const ComparisonGraph g7(5,
                           {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
                            {3, 4}},
                           1.0);
  const EdgeSplit s7 = SplitEdges(g7, 2);
  CHECK(s7.init_edges.size() == 4);
  CHECK(s7.iter_edges.size() == 3);
  std::set<std::size_t> all(s7.init_edges.begin(), s7.init_edges.end());
  all.insert(s7.iter_edges.begin(), s7.iter_edges.end());
  CHECK(all.size() == 7);

  const EdgeSplit again = SplitEdges(g7, 2);
  CHECK(again.init_edges == s7.init_edges);
  CHECK(again.iter_edges == s7.iter_edges);

  CHECK_THROWS_AS(SplitEdges(ComparisonGraph(2, {{0, 1}}, 1.0), 1),
                  DegenerateInputError);
}

TEST_CASE("restrict keeps the requested edges in order") {
  const ObservationBatch b = ObservationBatch::FromCounts(
      {{0, 1}, {0, 2}, {1, 2}}, {1, 2, 3}, 4);
  const std::vector<std::size_t> idx = {2, 0};
  const ObservationBatch r = b.Restrict(idx);
  REQUIRE(r.num_edges() == 2);
  CHECK(r.edges()[0] == Edge{1, 2});
  CHECK(r.mean(0) == 0.75);
  CHECK(r.mean(1) == 0.25);
  CHECK_THROWS_AS(ObservationBatch::FromCounts({{0, 1}}, {5}, 4),
                  ParameterError);
}

}  // namespace
}  // namespace advtopk
