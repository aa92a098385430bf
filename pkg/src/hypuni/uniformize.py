"""Exponential-density uniformization of a metric graph.

With density ρ(v) = exp(−ε d(v, base)) every edge gets the length ∫ρ ds,
computed in closed form under the assumption that the distance to the base
varies linearly along the edge (exact for radial edges).  Frontier vertices
carry an analytic tail ρ(f)/ε: the uniformized length of a unit-speed ray
continuing outward from f.  This models distance to the boundary of the
uniformized space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .graph import Curve, GraphError, MetricGraph, ParameterError, lex_shortest_path, starlikeness


def exp_segment_integral(w: float, a: float, b: float, eps: float) -> float:
    """∫₀ʷ exp(−ε·(a + (b−a)t/w)) dt."""
    slope = eps * (b - a)
    ea = math.exp(-eps * a)
    if abs(slope) < 1e-8:
        # series of (1 − e^{−s})/s around s = 0
        return w * ea * (1.0 - slope / 2.0 + slope * slope / 6.0)
    return w * (ea - math.exp(-eps * b)) / slope


def boundary_constant(M: float, eps: float) -> float:
    """Upper comparison constant (M + 1/ε)·e^{εM} between boundary distance and density."""
    return (M + 1.0 / eps) * math.exp(eps * M)


@dataclass
class BoundaryDistance:
    values: np.ndarray
    exit_vertex: np.ndarray

    def escape_path(self, ug: "UniformizedGraph", v: int) -> Curve:
        return ug.eps_geodesic(v, int(self.exit_vertex[v]))


class UniformizedGraph:
    """A :class:`MetricGraph` together with its ε-uniformized lengths."""

    def __init__(self, source: MetricGraph, eps: float):
        if not (eps > 0 and math.isfinite(eps)):
            raise ParameterError(f"epsilon must be positive, got {eps}")
        self.source = source
        self.epsilon = float(eps)
        self.dist_to_base = np.asarray(source.dist_to_base)
        self.density = np.exp(-self.epsilon * self.dist_to_base)
        self.edge_len_eps = {
            (u, v): exp_segment_integral(w, self.dist_to_base[u], self.dist_to_base[v], self.epsilon)
            for u, v, w in source.edges
        }
        self.tail = {f: self.density[f] / self.epsilon for f in source.frontier}
        self._eps_weights = [self.edge_len_eps[(u, v)] for u, v, _ in source.edges]
        adj = [[] for _ in range(source.n)]
        for (u, v), w in self.edge_len_eps.items():
            adj[u].append((v, w))
            adj[v].append((u, w))
        self._eps_adjacency = tuple(tuple(sorted(a)) for a in adj)

    def __repr__(self) -> str:
        return f"UniformizedGraph({self.source!r}, eps={self.epsilon})"

    @property
    def n(self) -> int:
        return self.source.n

    def eps_length(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        try:
            return self.edge_len_eps[key]
        except KeyError:
            raise GraphError(f"no edge between {u} and {v}") from None

    @cached_property
    def d_eps_matrix(self) -> np.ndarray:
        d = dijkstra(self.source.sparse(self._eps_weights), directed=False)
        d = np.minimum(d, d.T)
        d.setflags(write=False)
        return d

    def eps_geodesic(self, u: int, v: int) -> Curve:
        """Shortest path in the uniformized weights, lexicographic tie-break."""
        path = lex_shortest_path(self._eps_adjacency, self.d_eps_matrix[v], u, v)
        return Curve.from_vertices(self.source, path)

    def eps_cumulative(self, c: Curve) -> np.ndarray:
        """Uniformized arclength from the start of ``c`` to each of its vertices."""
        steps = [self.eps_length(a, b) for a, b in zip(c.vertices, c.vertices[1:])]
        return np.concatenate([[0.0], np.cumsum(steps)])

    @cached_property
    def boundary(self) -> BoundaryDistance:
        g = self.source
        if not g.frontier:
            raise ParameterError("unbounded directions unspecified: graph has an empty frontier")
        fr = list(g.frontier)
        totals = self.d_eps_matrix[:, fr] + self.density[fr][None, :] / self.epsilon
        k = totals.argmin(axis=1)
        vals = totals[np.arange(g.n), k]
        vals.setflags(write=False)
        return BoundaryDistance(vals, np.asarray(fr)[k])

    @cached_property
    def starlike_M(self) -> float:
        return starlikeness(self.source).M

    @cached_property
    def _k_weights(self) -> np.ndarray:
        delta = self.boundary.values
        return np.array(
            [w * 2.0 / (delta[u] + delta[v]) for (u, v, _), w in zip(self.source.edges, self._eps_weights)]
        )

    @cached_property
    def k_matrix(self) -> np.ndarray:
        d = dijkstra(self.source.sparse(self._k_weights), directed=False)
        d = np.minimum(d, d.T)
        d.setflags(write=False)
        return d

    @cached_property
    def k_tolerance(self) -> float:
        """Relative amount by which the k weight 2/(δ_u + δ_v) can undershoot
        the exact edge integral when δ is linear in uniformized arclength.

        That integral is ℓ_ε / logmean(δ_u, δ_v), so the ratio is the
        arithmetic over the logarithmic mean of the endpoint values.  The
        model is exact on radial edges and on escape paths.
        """
        delta = self.boundary.values
        worst = 0.0
        for u, v, _ in self.source.edges:
            a, b = delta[u], delta[v]
            if math.isclose(a, b, rel_tol=1e-12):
                continue
            logmean = (a - b) / math.log(a / b)
            worst = max(worst, 0.5 * (a + b) / logmean - 1.0)
        return float(worst)

    def export_text(self) -> str:
        from .formats import format_graph

        return format_graph(self.source, extra=self.edge_len_eps, header={"epsilon": self.epsilon})


def uniformize(g: MetricGraph, eps: float) -> UniformizedGraph:
    return UniformizedGraph(g, eps)


def ell_eps(ug: UniformizedGraph, c: Curve) -> float:
    """Uniformized length ∫ρ ds of a curve."""
    total = 0.0
    for a, b in zip(c.vertices, c.vertices[1:]):
        total += ug.eps_length(a, b)
    return total


def d_eps(ug: UniformizedGraph, u: int, v: int) -> float:
    return float(ug.d_eps_matrix[u, v])


def delta_eps(ug: UniformizedGraph) -> BoundaryDistance:
    """Distance to the uniformized boundary: min over frontier f of d_ε(v, f) + ρ(f)/ε."""
    return ug.boundary


def quasihyperbolic_dist(ug: UniformizedGraph, u: int, v: int) -> float:
    return float(ug.k_matrix[u, v])


def j_metric(ug: UniformizedGraph, u: int, v: int) -> float:
    delta = ug.boundary.values
    return math.log1p(ug.d_eps_matrix[u, v] / min(delta[u], delta[v]))


def harnack_violations(ug: UniformizedGraph, K: float = 1.0, rtol: float = 1e-12) -> list[tuple[int, int]]:
    """Pairs with d(u,v) ≤ K whose density ratio leaves [e^{−εK}, e^{εK}]."""
    d = ug.source.dist
    log_ratio = np.abs(-ug.epsilon * (ug.dist_to_base[:, None] - ug.dist_to_base[None, :]))
    limit = ug.epsilon * K
    close = d <= K
    bad = close & (log_ratio > limit + rtol * max(1.0, limit))
    return [(int(a), int(b)) for a, b in zip(*np.nonzero(bad))]


@dataclass
class BiLipschitzReport:
    min_ratio: float
    max_ratio: float
    spread: float
    bound: float
    tolerance: float
    pairs: int
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _pairs(n: int, spec, rng_seed: int = 0) -> list[tuple[int, int]]:
    if spec is None or spec == "all":
        return [(u, v) for u in range(n) for v in range(u + 1, n)]
    if isinstance(spec, int):
        rng = np.random.default_rng(rng_seed)
        out = []
        while len(out) < spec:
            u, v = (int(t) for t in rng.integers(0, n, size=2))
            if u != v:
                out.append((u, v))
        return out
    return [(int(u), int(v)) for u, v in spec]


def bilipschitz_report(
    ug: UniformizedGraph, sample: str | int | Iterable[tuple[int, int]] | None = "all", seed: int = 0
) -> BiLipschitzReport:
    """Spread of k(u,v)/d(u,v) over pairs with d ≥ 1, against (ε·C_M)²."""
    d = ug.source.dist
    k = ug.k_matrix
    ratios = [k[u, v] / d[u, v] for u, v in _pairs(ug.n, sample, seed) if d[u, v] >= 1.0]
    if not ratios:
        raise ParameterError("no sampled pair has d(u, v) >= 1")
    lo, hi = min(ratios), max(ratios)
    c = ug.epsilon * boundary_constant(ug.starlike_M, ug.epsilon)
    tol = ug.k_tolerance
    bound = c * c * (1.0 + tol)
    spread = hi / lo
    return BiLipschitzReport(lo, hi, spread, bound, tol, len(ratios), spread <= bound)


def sample_pairs(n: int, spec, seed: int = 0) -> list[tuple[int, int]]:
    return _pairs(n, spec, seed)


def exact_ray_boundary(s: float, eps: float) -> float:
    """δ_ε at distance s along an isometric ray from the base: e^{−εs}/ε."""
    return math.exp(-eps * s) / eps


def as_index_pairs(g: MetricGraph, pairs: Sequence[tuple]) -> list[tuple[int, int]]:
    return [(g.vertex(u), g.vertex(v)) for u, v in pairs]
