import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypuni.formats import parse_graph
from hypuni.graph import Curve, MetricGraph, ParameterError, gen_hyperbolic_grid, gen_path, gen_tree, geodesic
from hypuni.uniformize import (
    bilipschitz_report,
    boundary_constant,
    d_eps,
    ell_eps,
    exact_ray_boundary,
    exp_segment_integral,
    harnack_violations,
    j_metric,
    quasihyperbolic_dist,
    uniformize,
)

from oracles import density_integral
from strategies import connected_graphs


def test_unit_edge_at_base_matches_quadrature():
    ug = uniformize(gen_path(1), 1.0)
    assert ug.eps_length(0, 1) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    assert ug.eps_length(0, 1) == pytest.approx(density_integral(1.0, 0.0, 1.0, 1.0), rel=1e-12)
    assert ug.eps_length(0, 1) == pytest.approx(0.63212, abs=1e-5)


def test_level_edge_at_base_keeps_length():
    g = MetricGraph("oab", [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 0.7)])
    ug = uniformize(g, 2.0)
    assert exp_segment_integral(0.7, 0.0, 0.0, 2.0) == 0.7
    assert ug.eps_length(1, 2) == pytest.approx(0.7 * math.exp(-2.0), rel=1e-15)
    assert ug.density[g.base] == 1.0


@pytest.mark.parametrize("w,a,b,eps", [(1.0, 0.0, 1.0, 1.0), (2.5, 3.0, 1.0, 0.5), (0.3, 2.0, 2.0 + 1e-10, 3.0),
                                       (1.7, 4.0, 4.5, 3.0), (0.2, 1.0, 1.1, 0.01)])
def test_segment_integral_against_quadrature(w, a, b, eps):
    assert exp_segment_integral(w, a, b, eps) == pytest.approx(density_integral(w, a, b, eps), rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 5), st.floats(0, 8), st.floats(0, 8), st.floats(0.05, 4))
def test_segment_integral_property(w, a, b, eps):
    val = exp_segment_integral(w, a, b, eps)
    assert val == pytest.approx(density_integral(w, a, b, eps), rel=1e-9)
    lo, hi = w * math.exp(-eps * max(a, b)), w * math.exp(-eps * min(a, b))
    assert lo * (1 - 1e-12) <= val <= hi * (1 + 1e-12)


def test_radial_path_telescopes():
    g = gen_path(2)
    ug = uniformize(g, 1.0)
    c = geodesic(g, 0, 2)
    expected = 1 - math.exp(-2)
    assert ell_eps(ug, c) == pytest.approx(expected, rel=1e-14)
    assert ell_eps(ug, c) == pytest.approx(0.86466, abs=1e-5)
    assert ell_eps(ug, Curve((1,), (0.0,))) == 0.0
    assert d_eps(ug, 1, 1) == 0.0


@pytest.mark.parametrize("eps", [0.5, 1.0, 3.0])
def test_ray_boundary_distance_closed_form(eps):
    g = gen_path(6)
    ug = uniformize(g, eps)
    for v in range(g.n):
        s = g.dist_to_base[v]
        assert ug.boundary.values[v] == pytest.approx(exact_ray_boundary(s, eps), rel=1e-12)
        assert ug.boundary.exit_vertex[v] == g.frontier[0]


@settings(max_examples=50, deadline=None)
@given(connected_graphs(), st.sampled_from([0.5, 1.0, 3.0]))
def test_density_and_edge_invariants(g, eps):
    ug = uniformize(g, eps)
    assert np.all((ug.density > 0) & (ug.density <= 1))
    assert ug.density[g.base] == 1.0
    for u, v, w in g.edges:
        e = ug.eps_length(u, v)
        lo, hi = w * min(ug.density[u], ug.density[v]), w * max(ug.density[u], ug.density[v])
        assert lo * (1 - 1e-12) <= e <= hi * (1 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(connected_graphs(), st.sampled_from([0.5, 1.0, 3.0]), st.integers(1, 3))
def test_harnack_k_power(g, eps, K):
    assert harnack_violations(uniformize(g, eps), K) == []


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=7), st.sampled_from([0.5, 1.0, 3.0]), st.data())
def test_d_eps_is_infimum_over_curves(g, eps, data):
    ug = uniformize(g, eps)
    u = data.draw(st.integers(0, g.n - 1))
    v = data.draw(st.integers(0, g.n - 1))
    geo = ug.eps_geodesic(u, v)
    assert ell_eps(ug, geo) == pytest.approx(d_eps(ug, u, v), rel=1e-12, abs=1e-15)
    hyp = geodesic(g, u, v)
    assert ell_eps(ug, hyp) >= d_eps(ug, u, v) * (1 - 1e-12)
    # additivity under concatenation through a third vertex
    w = data.draw(st.integers(0, g.n - 1))
    a, b = geodesic(g, u, w), geodesic(g, w, v)
    assert ell_eps(ug, a.concat(b)) == pytest.approx(ell_eps(ug, a) + ell_eps(ug, b), rel=1e-12, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.sampled_from([0.5, 1.0, 3.0]))
def test_boundary_distance_band(g, eps):
    ug = uniformize(g, eps)
    ratio = ug.boundary.values / ug.density
    tol = eps * g.max_edge_length
    assert ratio.min() >= math.exp(-tol) / eps * (1 - 1e-12)
    assert ratio.max() <= boundary_constant(ug.starlike_M, eps) * math.exp(tol)


@pytest.mark.parametrize("eps", [0.5, 1.0, 3.0])
def test_tree_boundary_over_density_is_one_over_eps(eps):
    ug = uniformize(gen_tree(2, 5), eps)
    assert np.allclose(ug.boundary.values / ug.density, 1 / eps, rtol=1e-12)


def test_j_metric_examples():
    ug = uniformize(gen_path(4), 1.0)
    assert j_metric(ug, 2, 2) == 0.0
    assert quasihyperbolic_dist(ug, 2, 2) == 0.0
    # find a pair with d_eps equal to the smaller boundary distance on the ray:
    # from s to 0, d_eps = 1 − e^{−s} and δ(s) = e^{−s}, equal at s = log 2
    g = MetricGraph("abc", [(0, 1, math.log(2)), (1, 2, 3.0)], frontier=[2])
    ug = uniformize(g, 1.0)
    assert ug.d_eps_matrix[0, 1] == pytest.approx(ug.boundary.values[1], rel=1e-14)
    assert j_metric(ug, 0, 1) == pytest.approx(math.log(2), rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(), st.sampled_from([0.5, 1.0, 3.0]))
def test_j_below_k(g, eps):
    ug = uniformize(g, eps)
    tol = ug.k_tolerance
    for u in range(g.n):
        for v in range(g.n):
            assert j_metric(ug, u, v) <= quasihyperbolic_dist(ug, u, v) * (1 + tol) + 1e-12


def test_ray_k_over_d_is_constant():
    ug = uniformize(gen_path(8), 1.0)
    k, d = ug.k_matrix, ug.source.dist
    ratios = [k[u, v] / d[u, v] for u in range(9) for v in range(u + 1, 9)]
    # per unit edge the weight is 2·tanh(ε/2) whatever the depth
    assert np.allclose(ratios, 2 * math.tanh(0.5), rtol=1e-12)
    rep = bilipschitz_report(ug)
    assert rep.spread <= 1 + ug.k_tolerance


def test_bilipschitz_on_tree():
    ug = uniformize(gen_tree(2, 6), 1.0)
    rep = bilipschitz_report(ug)
    assert rep.passed
    assert rep.spread <= rep.bound


def test_bilipschitz_ignores_short_pairs():
    ug = uniformize(gen_tree(2, 3), 1.0)
    a = bilipschitz_report(ug, [(1, 2), (0, 3)])
    assert a.pairs == 2
    with pytest.raises(ParameterError):
        bilipschitz_report(ug, [(0, 0)])


def test_grid_boundary_band():
    ug = uniformize(gen_hyperbolic_grid(4, 8, 64), 1.0)
    ratio = ug.boundary.values / ug.density
    assert ratio.min() >= 1.0 * (1 - 1e-12)
    assert ratio.max() <= boundary_constant(ug.starlike_M, 1.0) * (1 + 1e-12)


def test_invalid_epsilon():
    with pytest.raises(ParameterError):
        uniformize(gen_path(2), 0.0)


def test_export_round_trip():
    ug = uniformize(gen_tree(2, 2), 0.5)
    g2 = parse_graph(ug.export_text())
    assert np.array_equal(g2.dist, ug.source.dist)
    assert "epsilon 0.5" in ug.export_text()
