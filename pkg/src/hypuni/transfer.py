"""Curve discretization and uniform-curve transfer across a rough isometry.

Every comparison emits the explicit constant it was checked against.  The
constants are assembled from ε, the measured rough-isometry constants and the
snap offsets introduced by moving arclength points onto graph vertices.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import Curve, geodesic
from .rough import (
    MapError,
    RoughMap,
    density_distortion,
    is_rough_isometry,
    quasi_inverse,
    round_trip_gaps,
)
from .uniformity import UniformityReport, check_uniform_curve, worker_count
from .uniformize import UniformizedGraph, boundary_constant, ell_eps


class ShortCurve(ValueError):
    """Raised for curves of length ≤ 1, which use the short-curve estimate instead."""


class TransferError(ValueError):
    pass


@dataclass(frozen=True)
class Discretization:
    """Points a_i = γ(i·q), i = 0..N, with N ≤ L < N+1 and q = L/N.

    ``segment[i]``/``fraction[i]`` locate a_i on the curve; ``snapped[i]`` is
    the position of the nearest curve vertex and ``offset[i]`` its arclength
    distance from a_i.
    """

    curve: Curve
    N: int
    q: float
    L: float
    arclength: tuple[float, ...]
    segment: tuple[int, ...]
    fraction: tuple[float, ...]
    snapped: tuple[int, ...]
    offset: tuple[float, ...]

    @property
    def snapped_vertices(self) -> list[int]:
        return [self.curve.vertices[p] for p in self.snapped]

    @property
    def max_offset(self) -> float:
        return max(self.offset)


def discretize(c: Curve) -> Discretization:
    L = c.length
    if L <= 1.0:
        raise ShortCurve(f"curve length {L} ≤ 1: use the short-curve comparison L·ρ(γ(0))")
    N = int(math.floor(L))
    if L - N >= 1.0:  # float guard
        N += 1
    q = L / N
    cum = np.asarray(c.cumulative)
    last = len(cum) - 1
    arcs, segs, fracs, snaps, offs = [], [], [], [], []
    for i in range(N + 1):
        s = L if i == N else i * q
        k = int(np.searchsorted(cum, s, side="right")) - 1
        k = min(max(k, 0), last - 1) if last > 0 else 0
        w = cum[k + 1] - cum[k] if last > 0 else 0.0
        t = 0.0 if w == 0 else min(max((s - cum[k]) / w, 0.0), 1.0)
        # nearest vertex, ties towards the later one
        p = k if (s - cum[k]) < (cum[min(k + 1, last)] - s) else min(k + 1, last)
        if i == 0:
            p = 0
        if i == N:
            p = last
        arcs.append(s)
        segs.append(k)
        fracs.append(t)
        snaps.append(p)
        offs.append(abs(cum[p] - s))
    return Discretization(c, N, q, L, tuple(arcs), tuple(segs), tuple(fracs), tuple(snaps), tuple(offs))


def point_base_distance(ug: UniformizedGraph, d: Discretization, i: int) -> float:
    """Distance to base at a_i under the linear-along-edges model."""
    v = d.curve.vertices
    k = d.segment[i]
    a = ug.dist_to_base[v[k]]
    if len(v) == 1:
        return float(a)
    b = ug.dist_to_base[v[k + 1]]
    return float(a + d.fraction[i] * (b - a))


@dataclass
class DiscreteSum:
    total: float
    integral: float
    ratio: float
    lower: float
    upper: float
    tolerance: float
    snapped: bool

    @property
    def within(self) -> bool:
        return self.lower / (1 + self.tolerance) <= self.ratio <= self.upper * (1 + self.tolerance)


def discrete_sum(ug: UniformizedGraph, d: Discretization, snapped: bool = False) -> DiscreteSum:
    """Σ_{i<N} ρ(a_i) compared with ∫_γ ρ ds.

    By default ρ is evaluated at the exact arclength points; with
    ``snapped`` it is evaluated at the snapped vertices and the bound widens
    by e^{ε·max offset}.
    """
    eps = ug.epsilon
    if snapped:
        verts = d.snapped_vertices
        total = float(sum(ug.density[verts[i]] for i in range(d.N)))
        tol = math.expm1(eps * max(d.offset[: d.N]))
    else:
        total = float(sum(math.exp(-eps * point_base_distance(ug, d, i)) for i in range(d.N)))
        tol = 0.0
    integral = ell_eps(ug, d.curve)
    A2 = math.exp(2 * eps)
    return DiscreteSum(total, integral, total / integral, 1.0 / (2 * A2), 2 * A2, tol, snapped)


@dataclass
class MapConstants:
    """Measured constants of a rough isometry and its quasi-inverse."""

    tau: float
    tau_inverse: float
    round_trip_source: float
    round_trip_target: float
    tau_density: float
    inverse: RoughMap = field(repr=False)

    @property
    def tau_eff(self) -> float:
        """One constant dominating all the above."""
        return max(self.tau, self.tau_inverse, self.round_trip_source,
                   self.round_trip_target, self.tau_density)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "tau_inverse": self.tau_inverse,
            "round_trip_source": self.round_trip_source,
            "round_trip_target": self.round_trip_target,
            "tau_density": self.tau_density,
            "tau_eff": self.tau_eff,
        }


def map_constants(m: RoughMap) -> MapConstants:
    if not m.verified:
        raise MapError("map must be verified")
    if not is_rough_isometry(m):
        raise MapError("constants are defined for rough isometries only")
    inv = quasi_inverse(m)
    rt_s, rt_t = round_trip_gaps(m, inv)
    tau_rho = max(density_distortion(m), density_distortion(inv))
    return MapConstants(m.tau, inv.tau, rt_s, rt_t, tau_rho, inv)


def _check_pair(ugY: UniformizedGraph, ugX: UniformizedGraph, m: RoughMap) -> None:
    if ugY.source is not m.source or ugX.source is not m.target:
        if ugY.source.names != m.source.names or ugX.source.names != m.target.names:
            raise MapError("uniformized graphs do not match the map's source/target")
    if not math.isclose(ugY.epsilon, ugX.epsilon):
        raise MapError("both sides must be uniformized with the same epsilon")


# -- Σρ(Φ(a_i)) comparison ----------------------------------------------------


@dataclass
class PhiSumComparison:
    integral: float
    phi_sum: float
    tail_swapped_sum: float
    ratio: float
    tail_ratio: float
    bound: float
    tolerance: float
    tau_used: float
    N: int

    @property
    def within(self) -> bool:
        hi = self.bound * (1 + self.tolerance)
        return all(1 / hi <= r <= hi for r in (self.ratio, self.tail_ratio))


def phi_sum_compare(ugY: UniformizedGraph, ugX: UniformizedGraph, m: RoughMap, c: Curve) -> PhiSumComparison:
    """∫_γ ρ^Y vs Σ_{i<N} ρ^X(Φ(a_i)) and the variant with the last term replaced by ρ^X(Φ(y))."""
    _check_pair(ugY, ugX, m)
    if not m.verified:
        raise MapError("map must be verified")
    if ugY.source.dist[c.start, c.end] <= 1.0:
        raise TransferError("endpoints must satisfy d(x, y) > 1")
    d = discretize(c)
    eps = ugY.epsilon
    snaps = d.snapped_vertices
    images = [m(v) for v in snaps]
    rho = ugX.density
    integral = ell_eps(ugY, c)
    head = float(sum(rho[images[i]] for i in range(d.N - 1)))  # empty when N = 1
    phi_sum = head + float(rho[images[d.N - 1]])
    tail = head + float(rho[m(c.end)])
    tau = density_distortion(m)
    bound = 2 * math.exp((2 + tau) * eps)
    tol = math.expm1(eps * max(d.offset))
    return PhiSumComparison(integral, phi_sum, tail, phi_sum / integral, tail / integral,
                            bound, tol, tau, d.N)


# -- d_ε comparison ----------------------------------------------------------


def _chain_upper(eps: float, tau: float, tau_rho: float, snap: float) -> float:
    """d_ε(Φx, Φy) ≤ K·d_ε(x, y) for d(x, y) ≥ 2 + τ, links of length ≤ 2 + 2·snap + τ."""
    g = 2.0 + 2.0 * snap + tau
    return g * math.exp(eps * g) * math.exp(eps * (tau_rho + snap)) * math.exp(2 * eps)


@dataclass
class DEpsComparison:
    pairs: list[tuple[int, int]]
    ratios: list[float]
    lower: float
    upper: float
    violations: list[str]
    excluded: list[tuple[int, int]]

    @property
    def min_ratio(self) -> float:
        return min(self.ratios) if self.ratios else math.nan

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else math.nan

    @property
    def hypothesis_violated(self) -> bool:
        return bool(self.violations)

    @property
    def within(self) -> bool:
        return not self.violations and all(self.lower <= r <= self.upper for r in self.ratios)

    def to_dict(self) -> dict:
        return {
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "lower_bound": self.lower,
            "upper_bound": self.upper,
            "violations": list(self.violations),
            "pairs": len(self.pairs),
            "excluded": len(self.excluded),
        }


def compare_d_eps(
    ugY: UniformizedGraph, ugX: UniformizedGraph, m: RoughMap, pairs: Iterable[tuple[int, int]]
) -> DEpsComparison:
    """Ratios d_ε^Y(x, y) / d_ε^X(Φx, Φy) with bounds depending on ε, τ and mesh size."""
    _check_pair(ugY, ugX, m)
    if not m.verified:
        raise MapError("map must be verified")
    eps = ugY.epsilon
    dY = ugY.source.dist
    violations: list[str] = []
    if is_rough_isometry(m):
        k = map_constants(m)
        tau = k.tau
        snap_y = 0.5 * ugY.source.max_edge_length
        snap_x = 0.5 * ugX.source.max_edge_length
        K1 = _chain_upper(eps, k.tau, k.tau_density, snap_y)
        K1_inv = _chain_upper(eps, k.tau_inverse, k.tau_density, snap_x)
        c_eps = -math.expm1(-eps) / eps
        rt = k.round_trip_source
        K2 = K1_inv + rt * math.exp(eps * (rt + k.tau_density)) / c_eps
        lower, upper = 1.0 / K1, K2
    else:
        tau = m.tau
        violations.append(
            f"map is a ({m.L}, {m.tau})-rough similarity, not a rough isometry; "
            "d_eps comparability is only asserted for L = 1"
        )
        lower, upper = 0.0, math.inf

    kept, excluded, ratios = [], [], []
    for x, y in pairs:
        if dY[x, y] < 2.0 + tau:
            excluded.append((x, y))
            continue
        kept.append((x, y))
        ratios.append(float(ugY.d_eps_matrix[x, y] / ugX.d_eps_matrix[m(x), m(y)]))
    if excluded:
        violations.append(f"{len(excluded)} pair(s) with d(x, y) < 2 + tau excluded")
    out = DEpsComparison(kept, ratios, lower, upper, violations, excluded)
    if is_rough_isometry(m) and ratios and not all(lower <= r <= upper for r in ratios):
        violations.append("ratio outside the asserted band")
    return out


# -- boundary distance comparison -------------------------------------------------


@dataclass
class DeltaEpsComparison:
    ratios: np.ndarray
    lower: float
    upper: float
    tau_used: float

    @property
    def within(self) -> bool:
        return bool(np.all((self.ratios >= self.lower) & (self.ratios <= self.upper)))

    def to_dict(self) -> dict:
        return {
            "min_ratio": float(self.ratios.min()),
            "max_ratio": float(self.ratios.max()),
            "lower_bound": self.lower,
            "upper_bound": self.upper,
            "tau": self.tau_used,
        }


def compare_delta_eps(ugY: UniformizedGraph, ugX: UniformizedGraph, m: RoughMap) -> DeltaEpsComparison:
    """Per-vertex δ_ε^Y(y) / δ_ε^X(Φ(y)).

    The band combines the density distortion of the map with the two-sided
    comparison δ_ε ≍ ρ_ε on each side, whose upper constant uses the
    starlikeness M of each graph.
    """
    _check_pair(ugY, ugX, m)
    if not m.verified:
        raise MapError("map must be verified")
    gY, gX = ugY.source, ugX.source
    if not gY.frontier or not gX.frontier:
        raise MapError("both graphs need a frontier")
    images = sorted({m(f) for f in gY.frontier})
    gap = gX.dist[np.ix_(list(gX.frontier), images)].min(axis=1).max()
    if gap > m.tau + 1e-12:
        raise MapError(f"frontier mismatch: a target frontier vertex is {gap} from the image frontier")
    eps = ugY.epsilon
    tau = density_distortion(m)
    cY = boundary_constant(ugY.starlike_M, eps)
    cX = boundary_constant(ugX.starlike_M, eps)
    mp = np.asarray(m.mapping)
    ratios = ugY.boundary.values / ugX.boundary.values[mp]
    lower = math.exp(-eps * tau) / (eps * cX)
    upper = eps * cY * math.exp(eps * tau)
    return DeltaEpsComparison(ratios, lower, upper, tau)


# -- the transfer ------------------------------------------------------------------


def close_points_lambda(eps: float, dist: float) -> float:
    """Uniformity constant of a geodesic of length ≤ ``dist`` (quasiconvexity and cigar)."""
    return max(math.exp(2 * eps * dist), 0.5 * eps * dist * math.exp(2 * eps * dist))


@dataclass
class TransferResult:
    x: int
    y: int
    branch: str
    curve: Curve
    report: UniformityReport
    bound: float
    bound_parts: dict
    x_curve: Curve | None = None
    x_report: UniformityReport | None = None
    lambda_x: float | None = None
    N: int | None = None
    snap_offset: float = 0.0
    middle_gap: float = 0.0
    end_gap: float = 0.0
    gap_bounds: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def lambda_y(self) -> float:
        return self.report.lam

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_row(self, names: Sequence[str]) -> dict:
        return {
            "x": names[self.x],
            "y": names[self.y],
            "branch": self.branch,
            "lambda_x": "" if self.lambda_x is None else self.lambda_x,
            "lambda_y": self.lambda_y,
            "bound": self.bound,
            "tolerance": self.report.tolerance,
            "pass": "pass" if self.passed else "fail",
        }


def transfer_uniform_curve(
    ugY: UniformizedGraph,
    ugX: UniformizedGraph,
    m: RoughMap,
    x: int,
    y: int,
    *,
    x_curve: Curve | None = None,
    lambda_x: float | None = None,
    constants: MapConstants | None = None,
) -> TransferResult:
    """Build a uniform curve from x to y in Y out of a uniform curve in X.

    Close pairs (d ≤ 4 + τ) get the Y-geodesic.  Otherwise the X-curve from
    Φ(x) to Φ(y) (default: its d_ε-geodesic) is discretized, its interior
    points are pulled back by the quasi-inverse and consecutive points are
    joined by Y-geodesics.
    """
    _check_pair(ugY, ugX, m)
    if not m.verified:
        raise MapError("map must be verified")
    if not is_rough_isometry(m):
        raise MapError("transfer requires a rough isometry (L = 1)")
    if x == y:
        raise TransferError("endpoints must be distinct")
    k = constants or map_constants(m)
    eps = ugY.epsilon
    gY = ugY.source
    tau = k.tau_eff
    dxy = gY.dist[x, y]

    if dxy <= 4.0 + tau:
        curve = geodesic(gY, x, y)
        rep = check_uniform_curve(ugY, curve)
        bound = close_points_lambda(eps, dxy)
        res = TransferResult(x, y, "close", curve, rep, bound, {"close_points": bound})
        if rep.lam > bound:
            res.failures.append(f"lambda_y {rep.lam} exceeds close-point bound {bound}")
        return res

    inv = k.inverse
    px, py = m(x), m(y)
    gamma = x_curve if x_curve is not None else ugX.eps_geodesic(px, py)
    if gamma.start != px or gamma.end != py:
        raise TransferError("X-curve must join Φ(x) to Φ(y)")
    if gamma.length < 4.0:
        raise TransferError(f"X-curve has length {gamma.length} < 4")
    x_rep = check_uniform_curve(ugX, gamma)
    lam_x = x_rep.lam if lambda_x is None else max(float(lambda_x), 1.0)

    d = discretize(gamma)
    snaps = d.snapped_vertices
    points = [x] + [inv(snaps[i]) for i in range(1, d.N)] + [y]
    curve = Curve((x,), (0.0,))
    for a, b in zip(points, points[1:]):
        if a != b:
            curve = curve.concat(geodesic(gY, a, b))
    rep = check_uniform_curve(ugY, curve)

    o = d.max_offset
    gaps = [gY.dist[a, b] for a, b in zip(points, points[1:])]
    mid = max(gaps[1:-1]) if len(gaps) > 2 else 0.0
    end = max(gaps[0], gaps[-1])
    mid_bound = 2.0 + k.tau_inverse + 2.0 * o
    end_bound = 2.0 + k.tau_inverse + k.round_trip_source + o
    declared = 3.0 * m.tau
    gap_bounds = {
        "middle": mid_bound,
        "end": end_bound,
        "middle_declared": 2.0 + declared + 2.0 * o,
        "end_declared": 2.0 + 2.0 * declared + o,
    }

    G = 2.0 + 2.0 * o + k.tau_inverse + k.round_trip_source
    Kd = G * math.exp(eps * G) * math.exp(eps * (k.tau_density + o)) * math.exp(2 * eps)
    K1 = _chain_upper(eps, k.tau, k.tau_density, 0.5 * gY.max_edge_length)
    cX = boundary_constant(ugX.starlike_M, eps)
    f_qc = Kd * lam_x * K1
    f_mid = eps * math.exp(eps * (G + k.tau_density)) * Kd * (lam_x * cX + (2.0 + o) * math.exp(eps * (2.0 + o)))
    f_end = eps * G * math.exp(2 * eps * G)
    bound = max(f_qc, f_mid, f_end)
    parts = {"quasiconvexity": f_qc, "cigar_middle": f_mid, "cigar_end": f_end,
             "link_length": G, "lambda_x": lam_x, "C_X": cX}

    res = TransferResult(x, y, "transfer", curve, rep, bound, parts, gamma, x_rep, lam_x, d.N,
                         o, float(mid), float(end), gap_bounds)
    tol = 1e-9
    if mid > mid_bound + tol or mid > gap_bounds["middle_declared"] + tol:
        res.failures.append(f"middle link {mid} exceeds {mid_bound}")
    if end > end_bound + tol or end > gap_bounds["end_declared"] + tol:
        res.failures.append(f"end link {end} exceeds {end_bound}")
    if rep.lam > bound:
        res.failures.append(f"lambda_y {rep.lam} exceeds transfer bound {bound}")
    return res


def transfer_pairs(
    ugY: UniformizedGraph, ugX: UniformizedGraph, m: RoughMap, pairs: Iterable[tuple[int, int]]
) -> list[TransferResult]:
    k = map_constants(m)
    pairs = list(pairs)
    ugY.d_eps_matrix, ugY.boundary, ugX.d_eps_matrix, ugX.boundary, ugX.starlike_M

    def one(p):
        return transfer_uniform_curve(ugY, ugX, m, p[0], p[1], constants=k)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, pairs))
    return [one(p) for p in pairs]
