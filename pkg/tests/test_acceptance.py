"""Exit criteria of the toolkit, one test per criterion.

Each check prints a single ``PASS``/``FAIL`` line with the measured values;
the lines are repeated in the pytest terminal summary.  Run the file
directly (``python3 tests/test_acceptance.py``) to get just those lines.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest

from hypuni import disk
from hypuni.graph import Curve, gen_hyperbolic_grid, gen_tree, hyperbolicity, perturb, scale, starlikeness
from hypuni.rough import RoughMap, identity_map, quasi_inverse, round_trip_gaps, verify_rough_map
from hypuni.transfer import compare_d_eps, discrete_sum, discretize, map_constants, transfer_pairs
from hypuni.uniformity import estimate_domain_uniformity
from hypuni.uniformize import bilipschitz_report, boundary_constant, harnack_violations, uniformize

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def criterion_1() -> bool:
    t0 = time.perf_counter()
    g = gen_tree(2, 5)
    hyp = hyperbolicity(g)
    M = starlikeness(g).M
    dt = time.perf_counter() - t0
    ok = hyp.delta_thin == 0 and hyp.delta_four_point == 0 and M == 0 and dt < 10
    return report(1, ok, f"tree(2,5) delta_thin={hyp.delta_thin} delta_4pt={hyp.delta_four_point} M={M} "
                         f"time={dt:.2f}s (limit 10s)")


def criterion_2() -> bool:
    graphs = {"tree(2,6)": gen_tree(2, 6), "grid(4,8,64)": gen_hyperbolic_grid(4, 8, 64)}
    bad, checked = 0, 0
    for g in graphs.values():
        close = int((g.dist <= 1).sum())
        for eps in (0.5, 1.0, 3.0):
            ug = uniformize(g, eps)
            ratio = ug.density[:, None] / ug.density[None, :]
            mask = g.dist <= 1
            lo, hi = math.exp(-eps), math.exp(eps)
            # exact in log form; the ratio itself is compared with one ulp of slack
            bad += len(harnack_violations(ug, 1.0, rtol=0.0))
            bad += int(((ratio[mask] < lo * (1 - 2**-52)) | (ratio[mask] > hi * (1 + 2**-52))).sum())
            checked += close
    return report(2, bad == 0, f"{checked} pairs with d<=1 over 2 graphs x eps in (0.5,1,3); violations={bad}")


def _random_walk(g, rng, steps):
    v = int(rng.integers(g.n))
    path = [v]
    for _ in range(steps):
        nbrs = [u for u, _ in g.adjacency[path[-1]]]
        if len(path) > 1 and len(nbrs) > 1:
            nbrs = [u for u in nbrs if u != path[-2]]
        path.append(int(nbrs[rng.integers(len(nbrs))]))
    return Curve.from_vertices(g, path)


def criterion_3() -> bool:
    rng = np.random.default_rng(2024)
    families = [gen_tree(2, 6), gen_hyperbolic_grid(4, 8, 64)]
    epsilons = (0.5, 1.0, 3.0)
    ugs = {(i, e): uniformize(g, e) for i, g in enumerate(families) for e in epsilons}
    done, bad, worst_tol = 0, 0, 0.0
    lo_seen, hi_seen = math.inf, 0.0
    while done < 1000:
        fam = done % 2
        g = families[fam]
        c = _random_walk(g, rng, int(rng.integers(2, 16)))
        if c.length <= 1.0:
            continue
        eps = epsilons[int(rng.integers(3))]
        s = discrete_sum(ugs[(fam, eps)], discretize(c))
        worst_tol = max(worst_tol, s.tolerance)
        lo_seen = min(lo_seen, s.ratio / s.lower)
        hi_seen = max(hi_seen, s.ratio / s.upper)
        if not s.within:
            bad += 1
        done += 1
    ok = bad == 0 and worst_tol < 0.10
    return report(3, ok, f"1000 random curves on tree(2,6) and grid(4,8,64); violations={bad} "
                         f"max ratio/upper={hi_seen:.4f} min ratio/lower={lo_seen:.4f} "
                         f"reported tolerance={worst_tol:.3g} (limit 0.10)")


def criterion_4() -> bool:
    worst = 0.0
    for b, depth in ((2, 5), (2, 6), (3, 4)):
        g = gen_tree(b, depth)
        assert starlikeness(g).M == 0
        for eps in (0.5, 1.0, 3.0):
            ug = uniformize(g, eps)
            dev = np.abs(eps * ug.boundary.values / ug.density - 1.0).max()
            worst = max(worst, float(dev))
    return report(4, worst < 0.05, f"trees with frontier=leaves, M=0: max |eps*delta/rho - 1| = {worst:.3g} "
                                    f"(tol limit 0.05)")


def criterion_5() -> bool:
    eps = 1.0
    ug = uniformize(gen_tree(2, 6), eps)
    M = ug.starlike_M
    rep = bilipschitz_report(ug)
    limit = (eps * boundary_constant(M, eps)) ** 2 * 1.1
    ok = rep.spread <= limit
    return report(5, ok, f"tree(2,6) eps=1: k/d max/min={rep.spread:.6f} over {rep.pairs} pairs; "
                         f"limit={limit:.4f} (M={M})")


def criterion_6() -> bool:
    t0 = time.perf_counter()
    g = gen_tree(2, 5)
    rng = np.random.default_rng(6)
    bad = 0
    worst = {"inv/3tau": 0.0, "src/2tau": 0.0, "tgt/tau": 0.0}
    for seed in range(50):
        mag = float(rng.uniform(0.1, 2.0))
        frac = float(rng.uniform(0.2, 1.0))
        p = perturb(g, mag, seed, pendant_fraction=frac, random_lengths=True)
        m = verify_rough_map(RoughMap(g, p.graph, p.mapping))
        tau = m.tau
        inv = verify_rough_map(quasi_inverse(m))
        src, tgt = round_trip_gaps(m, inv)
        slack = 1e-12 * max(1.0, tau)
        if inv.tau > 3 * tau + slack or src > 2 * tau + slack or tgt > tau + slack:
            bad += 1
        if tau > 0:
            worst["inv/3tau"] = max(worst["inv/3tau"], inv.tau / (3 * tau))
            worst["src/2tau"] = max(worst["src/2tau"], src / (2 * tau))
            worst["tgt/tau"] = max(worst["tgt/tau"], tgt / tau)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    ratios = " ".join(f"{k}={v:.3f}" for k, v in worst.items())
    return report(6, ok, f"50 pendant perturbations of tree(2,5): violations={bad}; worst {ratios}; "
                         f"time={dt:.2f}s (limit 30s)")


def _transfer_run(depth: int, n_pairs: int = 200, seed: int = 7):
    g = gen_tree(2, depth)
    p = perturb(g, 0.5)
    m = verify_rough_map(RoughMap(g, p.graph, p.mapping))
    ugY, ugX = uniformize(g, 1.0), uniformize(p.graph, 1.0)
    k = map_constants(m)
    far = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if g.dist[u, v] > 4 + k.tau_eff]
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(far), size=min(n_pairs, len(far)), replace=False)
    results = transfer_pairs(ugY, ugX, m, [far[i] for i in sorted(pick)])
    return m, results


def criterion_7() -> bool:
    lams, bad, bound_min, count = {}, 0, math.inf, 0
    for depth in (4, 6):
        m, results = _transfer_run(depth)
        assert m.tau == 0.5
        lams[depth] = max(r.lambda_y for r in results)
        bad += sum(1 for r in results if not r.passed or r.lambda_y > r.bound)
        bound_min = min(bound_min, min(r.bound for r in results))
        count += len(results)
    rel = abs(lams[6] - lams[4]) / lams[4]
    ok = bad == 0 and rel <= 0.20
    return report(7, ok, f"eps=1 tau=0.5, {count} transfers: lambda_Y depth4={lams[4]:.6f} "
                         f"depth6={lams[6]:.6f} rel diff={rel:.3g} (limit 0.20); "
                         f"bound violations={bad}; smallest F={bound_min:.4g}")


def criterion_8() -> bool:
    t0 = time.perf_counter()
    eps = 3.0
    rows = disk.divergence_table(eps, [5, 6, 7, 8, 9, 10])
    vals = [r.A_min for r in rows]
    increasing = all(b > a for a, b in zip(vals, vals[1:]))
    slope = disk.log_slope(rows)
    target = eps - 2
    slope_ok = abs(slope - target) <= 0.2 * target
    small = estimate_domain_uniformity(uniformize(gen_hyperbolic_grid(4, 8, 32), eps), "frontier")
    large = estimate_domain_uniformity(uniformize(gen_hyperbolic_grid(6, 12, 32), eps), "frontier")
    growth = large.lambda_hat / small.lambda_hat
    dt = time.perf_counter() - t0
    ok = increasing and slope_ok and growth >= 2 and dt < 120
    amins = ", ".join(f"{v:.3g}" for v in vals)
    return report(8, ok, f"eps=3 A_min(R=5..10)=[{amins}] strictly increasing={increasing}; "
                         f"log-slope={slope:.4f} vs eps-2={target} within 20%={slope_ok}; "
                         f"grid lambda_hat R4={small.lambda_hat:.4g} R6={large.lambda_hat:.4g} "
                         f"growth={growth:.1f}x (need 2x); time={dt:.2f}s")


def criterion_9() -> bool:
    g = gen_tree(2, 5)
    ug = uniformize(g, 1.0)
    pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if g.dist[u, v] >= 2]
    ident = compare_d_eps(ug, ug, verify_rough_map(identity_map(g)), pairs)
    exact = all(r == 1.0 for r in ident.ratios) and not ident.hypothesis_violated
    doubled = scale(g, 2.0)
    sim = verify_rough_map(RoughMap(g, doubled, np.arange(g.n), kind="similarity", L=2.0))
    flagged = compare_d_eps(ug, uniformize(doubled, 1.0), sim, pairs).hypothesis_violated
    return report(9, exact and flagged, f"identity: {len(ident.ratios)} ratios all exactly 1={exact}; "
                                        f"L=2 similarity flags hypothesis violation={flagged}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(check):
    assert check()


if __name__ == "__main__":
    import sys

    sys.exit(0 if all([c() for c in CRITERIA]) else 2)
