"""Uniform-domain condition for curves in a uniformized graph."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import Curve, GraphError
from .uniformize import UniformizedGraph, sample_pairs


@dataclass
class UniformityReport:
    """Quasiconvexity and cigar ratios of one curve.

    ``cigar_ratio`` is evaluated at curve vertices; ``cigar_edge_bound``
    bounds it over interior edge points using the 1-Lipschitz property of
    the boundary distance, and ``tolerance`` is the relative gap between them.
    """

    quasiconvexity_ratio: float
    cigar_ratio: float
    lam: float
    witness: int
    witness_position: int
    cigar_edge_bound: float
    tolerance: float

    @property
    def lambda_(self) -> float:
        return self.lam

    def to_dict(self) -> dict:
        return {
            "quasiconvexity_ratio": self.quasiconvexity_ratio,
            "cigar_ratio": self.cigar_ratio,
            "lambda": self.lam,
            "witness": self.witness,
            "witness_position": self.witness_position,
            "cigar_edge_bound": self.cigar_edge_bound,
            "tolerance": self.tolerance,
        }


def check_uniform_curve(ug: UniformizedGraph, c: Curve) -> UniformityReport:
    if c.start == c.end:
        raise GraphError("uniformity is defined for curves between distinct vertices")
    cum = ug.eps_cumulative(c)
    total = cum[-1]
    dist = ug.d_eps_matrix[c.start, c.end]
    if not dist > 0:
        raise GraphError("zero uniformized distance between distinct vertices")
    qc = total / dist

    delta = ug.boundary.values[list(c.vertices)]
    inner = np.minimum(cum, total - cum)
    ratios = inner / delta
    pos = int(ratios.argmax())
    cigar = float(ratios[pos])

    # interior points of edge (i, i+1): numerator ≤ min(cum[i+1], total − cum[i]),
    # δ at an interior point ≥ (δ_i + δ_{i+1} − e)/2
    e = np.diff(cum)
    num = np.minimum(cum[1:], total - cum[:-1])
    den = 0.5 * (delta[:-1] + delta[1:] - e)
    with np.errstate(divide="ignore"):
        edge = np.where(den > 0, num / np.where(den > 0, den, 1.0), math.inf)
    edge_bound = max(cigar, float(edge.max()) if len(edge) else cigar)
    tol = edge_bound / cigar - 1.0 if cigar > 0 else (0.0 if edge_bound == 0 else math.inf)
    return UniformityReport(float(qc), cigar, max(float(qc), cigar), c.vertices[pos], pos, edge_bound, tol)


@dataclass
class DomainUniformity:
    lambda_hat: float
    pairs: list[tuple[int, int]]
    reports: list[UniformityReport]
    failures: list[tuple[int, int]] = field(default_factory=list)
    lambda_cap: float | None = None

    def rows(self, ug: UniformizedGraph) -> list[dict]:
        names = ug.source.names
        return [
            {
                "u": names[u],
                "v": names[v],
                "d_eps": float(ug.d_eps_matrix[u, v]),
                "lambda": r.lam,
                "witness": names[r.witness],
                "tolerance": r.tolerance,
            }
            for (u, v), r in zip(self.pairs, self.reports)
        ]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("HYPUNI_THREADS", "1")))
    except ValueError:
        return 1


def _pair_list(ug: UniformizedGraph, spec, seed: int) -> list[tuple[int, int]]:
    if spec == "frontier":
        fr = ug.source.frontier
        return [(a, b) for i, a in enumerate(fr) for b in fr[i + 1:]]
    pairs = sample_pairs(ug.n, spec, seed)
    return [(u, v) for u, v in pairs if u != v]


def estimate_domain_uniformity(
    ug: UniformizedGraph,
    pair_sample: str | int | Iterable[tuple[int, int]] = "all",
    *,
    lambda_cap: float | None = None,
    seed: int = 0,
) -> DomainUniformity:
    """Largest λ over d_ε-geodesics between sampled pairs.

    ``pair_sample`` is ``"all"``, ``"frontier"`` (all frontier pairs), a
    sample size, or an explicit list of vertex pairs.
    """
    pairs = _pair_list(ug, pair_sample, seed)
    if not pairs:
        raise GraphError("empty pair sample")

    def one(p):
        return check_uniform_curve(ug, ug.eps_geodesic(*p))

    ug.d_eps_matrix, ug.boundary  # populate caches before fanning out
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(one, pairs))
    else:
        reports = [one(p) for p in pairs]
    lam = max(r.lam for r in reports)
    failures = [] if lambda_cap is None else [p for p, r in zip(pairs, reports) if r.lam > lambda_cap]
    return DomainUniformity(lam, pairs, reports, failures, lambda_cap)
