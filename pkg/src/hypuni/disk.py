"""Closed-form estimates for the uniformized hyperbolic disk with ε > 2.

The disk carries the metric |dz|/(1 − |z|²) (curvature −4), so the circle
of radius R about 0 has length (π/2)(e^{2R} − e^{−2R}).  For ε > 2 the
uniformity constant needed to join two antipodal points at radius R grows
without bound in R; :func:`required_constant_lower_bound` makes that
growth explicit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import ParameterError

A_CAP = 1e12


def _need_eps(eps: float) -> None:
    if not eps > 2:
        raise ParameterError(f"the non-uniformity estimates need epsilon > 2, got {eps}")


def circle_length(R: float) -> float:
    if not R > 0:
        raise ParameterError("radius must be positive")
    return math.pi * math.sinh(2 * R)


def antipodal_points(R: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Euclidean coordinates of the points at hyperbolic distance R on the real axis."""
    r = math.tanh(R)
    return (r, 0.0), (-r, 0.0)


def dist_eps_upper(eps: float, R: float) -> float:
    """(2/ε)e^{−εR}: both points escape along radial rays to the single boundary point."""
    _need_eps(eps)
    if not R > 0:
        raise ParameterError("radius must be positive")
    return 2.0 / eps * math.exp(-eps * R)


def annulus_bounds(eps: float, A: float, R: float) -> tuple[float, float]:
    """(inner, outer) radii of the annulus that traps every A-uniform curve from z_R to w_R."""
    if A < 1:
        raise ParameterError("uniformity constant must be >= 1")
    if not eps > 0:
        raise ParameterError("epsilon must be positive")
    inner = R - math.log(2 * A + 1) / eps
    outer = R + math.log(A + 1) / eps
    return inner, outer


def c_A(eps: float, A: float) -> float:
    return (A + 1) * (math.pi / 8) * (2 * A + 1) ** (-2.0 / eps)


def _excess(eps: float, A: float, R: float) -> float:
    """log of [C_A e^{−(ε−2)R}] / [(2A/ε) e^{−εR}]; ≤ 0 iff the final inequality holds."""
    return (
        math.log(A + 1) + math.log(math.pi / 8) - (2.0 / eps) * math.log(2 * A + 1)
        - (eps - 2) * R - math.log(2 * A / eps) + eps * R
    )


def feasible(eps: float, A: float, R: float) -> bool:
    """Whether C_A e^{−(ε−2)R} ≤ (2A/ε) e^{−εR}."""
    return _excess(eps, A, R) <= 0


def required_constant_lower_bound(eps: float, R: float, A_cap: float = A_CAP, rtol: float = 1e-12) -> float:
    """Smallest A ≥ 1 compatible with the final inequality at radius R.

    ``feasible`` is monotone in A, so the minimum is found by bisection in
    log A.  Returns ``math.inf`` when even ``A_cap`` is not enough.
    """
    _need_eps(eps)
    if not R > 0:
        raise ParameterError("radius must be positive")
    if feasible(eps, 1.0, R):
        return 1.0
    if not feasible(eps, A_cap, R):
        return math.inf
    lo, hi = 0.0, math.log(A_cap)
    while hi - lo > rtol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if feasible(eps, math.exp(mid), R):
            hi = mid
        else:
            lo = mid
    return math.exp(hi)


@dataclass
class ChainCheck:
    eps: float
    A: float
    R: float
    final_inequality: bool
    d_eps_upper: float
    inner: float
    outer: float
    trapped_length_lower: float
    consistent: bool
    problems: list[str] = field(default_factory=list)


def inequality_chain(eps: float, A: float, R: float) -> ChainCheck:
    """Re-derive every quantity of the argument at (ε, A, R) and cross-check them."""
    _need_eps(eps)
    upper = dist_eps_upper(eps, R)
    inner, outer = annulus_bounds(eps, A, R)
    trapped = (A + 1) * math.exp(-eps * R) * (math.pi / 8) * math.exp(2 * (R - math.log(2 * A + 1) / eps))
    lhs = c_A(eps, A) * math.exp(-(eps - 2) * R)
    problems = []
    if not math.isclose(trapped, lhs, rel_tol=1e-9):
        problems.append("trapped length differs from C_A e^{-(eps-2)R}")
    if not inner < R < outer:
        problems.append("annulus does not contain radius R")
    if upper <= 0 or trapped <= 0:
        problems.append("non-positive length")
    ok = feasible(eps, A, R)
    if ok and trapped > A * upper * (1 + 1e-12):
        problems.append("feasible triple violates trapped length <= A * d_eps bound")
    return ChainCheck(eps, A, R, ok, upper, inner, outer, trapped, not problems, problems)


@dataclass
class DivergenceRow:
    R: float
    A_min: float
    inner: float
    outer: float


def divergence_table(eps: float, radii, A_cap: float = A_CAP) -> list[DivergenceRow]:
    rows = []
    for R in radii:
        a = required_constant_lower_bound(eps, R, A_cap)
        inner, outer = annulus_bounds(eps, a, R) if math.isfinite(a) else (-math.inf, math.inf)
        rows.append(DivergenceRow(float(R), a, inner, outer))
    return rows


def log_slope(rows: list[DivergenceRow]) -> float:
    """Least-squares slope of log A_min against R over the finite rows."""
    pts = [(r.R, math.log(r.A_min)) for r in rows if math.isfinite(r.A_min)]
    if len(pts) < 2:
        return math.nan
    n = len(pts)
    mx = sum(p[0] for p in pts) / n
    my = sum(p[1] for p in pts) / n
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    return sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx


def divergence_onset(eps: float, R_max: float = 50.0, step: float = 0.01) -> float:
    """Smallest R on a grid of spacing ``step`` where A_min exceeds 1."""
    _need_eps(eps)
    R = step
    while R <= R_max:
        if required_constant_lower_bound(eps, R) > 1.0:
            return R
        R += step
    return math.inf


@dataclass
class ScaledSpaceNote:
    eps: float
    eps1: float
    L: float
    C: float
    statement: str
    conclusion: str
    divergence: list[DivergenceRow]


def scaled_space_note(eps: float, eps1: float, radii=range(5, 11)) -> ScaledSpaceNote:
    """The disk with metric scaled by ε₁/ε: its ε-uniformization is the ε₁-uniformization of the disk."""
    if not 0 < eps1 < eps:
        raise ParameterError("need 0 < eps1 < eps")
    L = eps1 / eps
    if math.isclose(L, 1.0):
        raise ParameterError("L = 1 is a rough isometry; the scaling argument needs L != 1")
    table = divergence_table(eps, radii) if eps > 2 else []
    return ScaledSpaceNote(
        eps,
        eps1,
        L,
        0.0,
        f"Z = disk with d_Z = {L:g}·d; Z_eps = Y_eps1",
        f"a ({L:g}, 0)-rough similarity joins a uniform Z_eps to the non-uniform Y_eps"
        if eps > 2
        else "eps <= 2: no non-uniformity claim",
        table,
    )
