# Copyright 2026 The advtopk Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import advtopk


def test_generation_is_seeded():
    a = advtopk.generate_scores(10, advtopk.ScoreRange(0.5, 1.0), seed=3)
    b = advtopk.generate_scores(10, advtopk.ScoreRange(0.5, 1.0), seed=3)
    assert a.values == b.values
    assert a.values == sorted(a.values, reverse=True)
    g = advtopk.generate_er_graph(4, 1.0)
    assert len(g.edges) == 6


def test_exact_pipeline_recovers_top_k():
    w = advtopk.ScoreVector([1.0, 0.9, 0.7, 0.6, 0.55, 0.5])
    g = advtopk.generate_er_graph(6, 1.0)
    batch = advtopk.exact_observations(w, g, 0.8)
    result = advtopk.spectral_mle(batch, g, 0.8, 2)
    assert sorted(result["top_k"]) == [0, 1]
    assert result["trace_csv"].startswith("t,replaced_count,max_change,threshold")


def test_rank_centrality_two_items():
    w = advtopk.ScoreVector([1.0, 0.5])
    g = advtopk.ComparisonGraph(2, [(0, 1)], 1.0)
    out = advtopk.rank_centrality(advtopk.exact_observations(w, g, 1.0), g, 1.0)
    assert out["stationary"][0] == pytest.approx(2.0 / 3.0)
    assert out["converged"]


def test_eta_estimation():
    w = advtopk.ScoreVector([3.0, 1.0], advtopk.ScoreRange(1.0, 3.0))
    g = advtopk.ComparisonGraph(2, [(0, 1)], 1.0)
    m2 = advtopk.exact_second_moment(w, g, 0.8)
    assert m2[0][0] == pytest.approx(0.4625)
    assert advtopk.estimate_eta_exact(w, g, 0.8).eta_hat == pytest.approx(0.8, abs=1e-8)
    assert advtopk.required_L_for_eta(0.1, 1000, 1e-3) == 1382


def test_bounds():
    assert advtopk.binary_kl(1.0, 0.5) == pytest.approx(math.log(2.0))
    assert advtopk.binary_chi2(0.6, 0.5) == pytest.approx(0.04)
    assert advtopk.sample_complexity_scaling(1000, 0.75, 0.4) == pytest.approx(
        172694, rel=1e-5)
    with pytest.raises(advtopk.ParameterError):
        advtopk.fano_lower_bound(4, 2, 0.5, 1.0, 0.8, 0.2)


def test_fit_and_sweep():
    pts = [(eta, 3.0 / (2 * eta - 1) ** 2) for eta in (0.6, 0.7, 0.8)]
    C, residual = advtopk.fit_inverse_square(pts)
    assert C == pytest.approx(3.0)
    assert residual < 1e-12
    csv = advtopk.sweep_eta(30, 3, [0.9], [0.3], [20], trials=2, seed=4)
    lines = csv.strip().splitlines()
    assert lines[0] == "eta,delta_k,L,s_norm,successes,trials,rate,wilson"
    assert len(lines) == 2


def test_errors_are_typed():
    with pytest.raises(advtopk.ParameterError):
        advtopk.ScoreRange(0.0, 1.0)
    assert issubclass(advtopk.ParameterError, advtopk.Error)
