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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "advtopk/bounds.h"
#include "advtopk/core_model.h"
#include "advtopk/errors.h"
#include "advtopk/eta_estimation.h"
#include "advtopk/experiment.h"
#include "advtopk/mle_refinement.h"
#include "advtopk/spectral_ranking.h"

namespace py = pybind11;
using namespace advtopk;

namespace {

std::vector<double> ToVector(std::span<const double> s) {
  return {s.begin(), s.end()};
}

std::vector<std::pair<int, int>> EdgePairs(std::span<const Edge> edges) {
  std::vector<std::pair<int, int>> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) out.emplace_back(e.i, e.j);
  return out;
}

std::vector<Edge> ToEdges(const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) out.push_back({i, j});
  return out;
}

}  // namespace

PYBIND11_MODULE(_advtopk, m) {
  m.doc() = "Top-K ranking under an adversarial BTL mixture";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError",
                                               error.ptr());
  py::register_exception<DegenerateMixtureError>(m, "DegenerateMixtureError",
                                                 error.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", error.ptr());
  py::register_exception<ConditioningError>(m, "ConditioningError",
                                            error.ptr());
  py::register_exception<BracketingError>(m, "BracketingError", error.ptr());

  py::class_<ScoreRange>(m, "ScoreRange")
      .def(py::init([](double w_min, double w_max) {
             ScoreRange r{w_min, w_max};
             r.Validate();
             return r;
           }),
           py::arg("w_min") = 0.5, py::arg("w_max") = 1.0)
      .def_readonly("w_min", &ScoreRange::w_min)
      .def_readonly("w_max", &ScoreRange::w_max);

  py::class_<ScoreVector>(m, "ScoreVector")
      .def(py::init<std::vector<double>, ScoreRange>(), py::arg("values"),
           py::arg("range") = ScoreRange{})
      .def_property_readonly("values",
                             [](const ScoreVector& w) { return ToVector(w.values()); })
      .def_property_readonly("range", &ScoreVector::range)
      .def("__len__", &ScoreVector::size)
      .def("__getitem__", [](const ScoreVector& w, int i) {
        if (i < 0 || i >= w.size()) throw py::index_error();
        return w[i];
      });

  py::class_<ComparisonGraph>(m, "ComparisonGraph")
      .def(py::init([](int n, const std::vector<std::pair<int, int>>& edges,
                       double p) { return ComparisonGraph(n, ToEdges(edges), p); }),
           py::arg("n"), py::arg("edges"), py::arg("p"))
      .def_property_readonly("n", &ComparisonGraph::n)
      .def_property_readonly("p", &ComparisonGraph::p)
      .def_property_readonly("edges",
                             [](const ComparisonGraph& g) { return EdgePairs(g.edges()); })
      .def_property_readonly("below_connectivity_threshold",
                             &ComparisonGraph::below_connectivity_threshold)
      .def("degrees", &ComparisonGraph::Degrees)
      .def("is_connected", &ComparisonGraph::IsConnected);

  py::class_<ObservationBatch>(m, "ObservationBatch")
      .def_static(
          "from_counts",
          [](const std::vector<std::pair<int, int>>& edges,
             std::vector<std::int64_t> wins, std::int64_t L) {
            return ObservationBatch::FromCounts(ToEdges(edges), std::move(wins), L);
          },
          py::arg("edges"), py::arg("wins"), py::arg("L"))
      .def_property_readonly("L", &ObservationBatch::L)
      .def_property_readonly("edges",
                             [](const ObservationBatch& b) { return EdgePairs(b.edges()); })
      .def_property_readonly("means",
                             [](const ObservationBatch& b) { return ToVector(b.means()); });

  m.def("generate_scores", &GenerateScores, py::arg("n"),
        py::arg("range") = ScoreRange{}, py::arg("seed") = 1);
  m.def("generate_er_graph", &GenerateErGraph, py::arg("n"), py::arg("p"),
        py::arg("seed") = 1);
  m.def("default_edge_probability", &DefaultEdgeProbability, py::arg("n"));
  m.def(
      "sample_observations",
      [](const ScoreVector& w, const ComparisonGraph& g, double eta,
         std::int64_t L, std::uint64_t seed) {
        return SampleObservations(w, g, MixtureParams(eta), L, seed, false);
      },
      py::arg("w"), py::arg("g"), py::arg("eta"), py::arg("L"),
      py::arg("seed") = 1);
  m.def(
      "exact_observations",
      [](const ScoreVector& w, const ComparisonGraph& g, double eta,
         std::int64_t nominal_L) {
        return ExactObservations(w, g, MixtureParams(eta), nominal_L);
      },
      py::arg("w"), py::arg("g"), py::arg("eta"), py::arg("nominal_L") = 1000000);
  m.def("delta_k", &DeltaK, py::arg("w"), py::arg("K"));
  m.def("impose_separation", &ImposeSeparation, py::arg("w"), py::arg("K"),
        py::arg("delta_k"));

  m.def(
      "rank_centrality",
      [](const ObservationBatch& batch, const ComparisonGraph& g, double eta,
         ScoreRange range) {
        const auto r = RankCentrality(batch, g, MixtureParams(eta), range);
        return py::dict(py::arg("scores") = ToVector(r.scores.values()),
                        py::arg("stationary") = r.stationary.distribution,
                        py::arg("iterations") = r.stationary.iterations_used,
                        py::arg("residual") = r.stationary.residual,
                        py::arg("converged") = r.stationary.converged,
                        py::arg("reducible") = r.reducible,
                        py::arg("clamped_means") = r.clamped_means);
      },
      py::arg("batch"), py::arg("g"), py::arg("eta"),
      py::arg("range") = ScoreRange{});

  m.def(
      "spectral_mle",
      [](const ObservationBatch& batch, const ComparisonGraph& g, double eta,
         int K, std::optional<int> T, double c, bool estimated_threshold,
         ScoreRange range, std::uint64_t seed) {
        RefinementConfig cfg = RefinementConfig::Default(
            g.n(), eta,
            estimated_threshold ? ThresholdMode::kEstimatedEta
                                : ThresholdMode::kKnownEta);
        if (T) cfg.T = *T;
        cfg.c = c;
        const auto r = SpectralMle(batch, g, eta, K, cfg, range, seed);
        std::ostringstream trace;
        r.trace.WriteCsv(trace);
        return py::dict(py::arg("top_k") = r.top_k,
                        py::arg("final_scores") = r.trace.final_scores,
                        py::arg("trace_csv") = trace.str(),
                        py::arg("init_fallback") = r.trace.init_fallback,
                        py::arg("disconnected") = r.trace.disconnected);
      },
      py::arg("batch"), py::arg("g"), py::arg("eta"), py::arg("K"),
      py::arg("T") = py::none(), py::arg("c") = 1.0,
      py::arg("estimated_threshold") = false, py::arg("range") = ScoreRange{},
      py::arg("seed") = 1);
  m.def("threshold_known", &ThresholdKnown, py::arg("t"), py::arg("n"),
        py::arg("p"), py::arg("L"), py::arg("eta"), py::arg("c") = 1.0);
  m.def("threshold_estimated", &ThresholdEstimated, py::arg("t"), py::arg("n"),
        py::arg("p"), py::arg("L"), py::arg("eta_hat"), py::arg("c") = 1.0);

  py::class_<EtaEstimate>(m, "EtaEstimate")
      .def_readonly("eta_hat", &EtaEstimate::eta_hat)
      .def_property_readonly("method",
                             [](const EtaEstimate& e) {
                               return e.method == EtaMethod::kTensorPower
                                          ? "tensor-power"
                                          : "eigen-quadratic";
                             })
      .def_readonly("sigma1", &EtaEstimate::sigma1)
      .def_readonly("sigma2", &EtaEstimate::sigma2)
      .def_readonly("mu", &EtaEstimate::mu)
      .def_readonly("residual", &EtaEstimate::residual)
      .def_readonly("degenerate", &EtaEstimate::degenerate)
      .def_readonly("clamped", &EtaEstimate::clamped);

  m.def(
      "exact_second_moment",
      [](const ScoreVector& w, const ComparisonGraph& g, double eta) {
        return ExactMoments(BuildDistributionVectors(w, g), eta, false).M2;
      },
      py::arg("w"), py::arg("g"), py::arg("eta"));
  m.def(
      "estimate_eta_exact",
      [](const ScoreVector& w, const ComparisonGraph& g, double eta,
         const std::string& method) {
        const MomentPair mp =
            ExactMoments(BuildDistributionVectors(w, g), eta, method == "tensor");
        return method == "tensor" ? EstimateEtaTensor(mp) : EstimateEtaEigen(mp);
      },
      py::arg("w"), py::arg("g"), py::arg("eta"), py::arg("method") = "eigen");
  m.def(
      "estimate_eta_from_workers",
      [](const ScoreVector& w, const ComparisonGraph& g, double eta,
         int workers, std::uint64_t seed) {
        const auto wr = SampleWorkerResponses(w, g, eta, workers, seed);
        return EstimateEtaTensor(EmpiricalMoments(wr));
      },
      py::arg("w"), py::arg("g"), py::arg("eta"), py::arg("workers"),
      py::arg("seed") = 1);
  m.def("required_L_for_eta", &RequiredLForEta, py::arg("epsilon"),
        py::arg("n"), py::arg("delta"), py::arg("C_L") = 1.0);

  m.def("binary_kl", &BinaryKl, py::arg("a"), py::arg("b"));
  m.def("binary_chi2", &BinaryChi2, py::arg("a"), py::arg("b"));
  m.def(
      "fano_lower_bound",
      [](int n, int K, double p, double L, double eta, double delta_k,
         double C_I) {
        BoundQuery q{n, K, p, L, eta, delta_k, {C_I, 1.0, 1.0}};
        return FanoLowerBound(q).bound;
      },
      py::arg("n"), py::arg("K"), py::arg("p"), py::arg("L"), py::arg("eta"),
      py::arg("delta_k"), py::arg("C_I") = 1.0);
  m.def(
      "sample_complexity_scaling",
      [](int n, double eta, double delta_k, bool unknown_eta) {
        BoundQuery q;
        q.n = n;
        q.K = 1;
        q.p = 1.0;
        q.eta = eta;
        q.delta_K = delta_k;
        return SampleComplexityScaling(
            q, unknown_eta ? Regime::kUnknownEta : Regime::kKnownEta);
      },
      py::arg("n"), py::arg("eta"), py::arg("delta_k"),
      py::arg("unknown_eta") = false);

  m.def("wilson_half_width", &WilsonHalfWidth, py::arg("successes"),
        py::arg("trials"));
  m.def(
      "fit_inverse_square",
      [](const std::vector<std::pair<double, double>>& points) {
        const InverseSquareFit fit = FitInverseSquare(points);
        return std::make_pair(fit.C, fit.residual);
      },
      py::arg("points"));
  m.def(
      "sweep_eta",
      [](int n, int K, std::vector<double> eta_grid,
         std::vector<double> delta_k_grid, std::vector<std::int64_t> L_grid,
         int trials, std::uint64_t seed, int threads) {
        SweepConfig cfg;
        cfg.n = n;
        cfg.K = K;
        cfg.eta_grid = std::move(eta_grid);
        cfg.delta_k_grid = std::move(delta_k_grid);
        cfg.L_grid = std::move(L_grid);
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        std::ostringstream csv;
        {
          py::gil_scoped_release release;
          SweepEta(cfg).WriteCsv(csv);
        }
        return csv.str();
      },
      py::arg("n"), py::arg("K"), py::arg("eta_grid"), py::arg("delta_k_grid"),
      py::arg("L_grid"), py::arg("trials"), py::arg("seed") = 1,
      py::arg("threads") = 0);
}
