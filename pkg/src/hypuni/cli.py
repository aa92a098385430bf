"""Command line driver.

Exit status: 0 on success, 1 on input errors, 2 when a checked bound fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import disk
from .formats import read_graph, write_graph
from .graph import (
    EXHAUSTIVE_HYPERBOLICITY_MAX,
    GraphError,
    ParameterError,
    gen_comb,
    gen_hyperbolic_grid,
    gen_path,
    gen_tree,
    hyperbolicity,
    perturb,
    starlikeness,
)
from .rough import MapError, RoughMap, quasi_inverse, read_map, round_trip_gaps, verify_rough_map, write_map
from .transfer import TransferError, transfer_pairs
from .uniformity import estimate_domain_uniformity
from .uniformize import bilipschitz_report, boundary_constant, uniformize

EXIT_OK, EXIT_INPUT, EXIT_BOUND = 0, 1, 2

# relative slack on measured-vs-theoretical comparisons of exact quantities
FLOAT_TOL = 1e-9


class SchemaMismatch(ValueError):
    pass


def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def dump_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in row.items()})
    return buf.getvalue()


def emit(args, payload: Any, rows: list[dict] | None = None) -> None:
    fmt = args.format or ("csv" if rows is not None else "json")
    text = dump_csv(rows) if fmt == "csv" and rows is not None else dump_json(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def read_pairs(path: str, g) -> list[tuple[int, int]]:
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"{path}: line {lineno}: expected 'u v'")
        pairs.append((g.vertex(parts[0]), g.vertex(parts[1])))
    return pairs


def _pair_spec(args, g):
    if args.pairs:
        return read_pairs(args.pairs, g)
    if args.sample:
        return int(args.sample)
    return "all"


# -- commands -----------------------------------------------------------------


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "tree":
        g = gen_tree(args.branching, args.depth)
    elif kind == "comb":
        g = gen_comb(args.teeth, args.resolution)
    elif kind == "grid":
        g = gen_hyperbolic_grid(args.rmax, args.rings, args.sectors)
    elif kind == "path":
        g = gen_path(args.depth)
    else:
        raise ParameterError(f"unknown generator {kind!r}")
    if args.perturb is not None:
        p = perturb(g, args.perturb, args.seed, pendant_fraction=args.pendant_fraction,
                    random_lengths=args.random_lengths, stretch=args.stretch)
        if args.map:
            write_map(verify_rough_map(RoughMap(g, p.graph, p.mapping)), args.map)
        if args.graph2:
            write_graph(g, args.graph2)
        g = p.graph
    if args.out:
        write_graph(g, args.out)
    else:
        from .formats import format_graph

        sys.stdout.write(format_graph(g))
    return EXIT_OK


def cmd_analyze(args) -> int:
    g = read_graph(args.graph)
    if args.sample or g.n > EXHAUSTIVE_HYPERBOLICITY_MAX:
        hyp = hyperbolicity(g, "sampled", samples=args.sample or 10000, seed=args.seed)
    else:
        hyp = hyperbolicity(g)
    report = {
        "vertices": g.n,
        "edges": len(g.edges),
        "diameter": g.diameter,
        "base": g.names[g.base],
        "hyperbolicity": hyp.to_dict(),
    }
    if g.frontier:
        report["starlikeness"] = starlikeness(g).to_dict(g)
    emit(args, report)
    return EXIT_OK


def cmd_uniformize(args) -> int:
    g = read_graph(args.graph)
    ug = uniformize(g, args.epsilon)
    if args.format == "edgelist":
        text = ug.export_text()
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    report: dict[str, Any] = {"epsilon": ug.epsilon, "vertices": g.n}
    status = EXIT_OK
    if g.frontier:
        ratio = ug.boundary.values / ug.density
        M = ug.starlike_M
        c = boundary_constant(M, ug.epsilon)
        lower_ok = bool(ratio.min() >= (1 - FLOAT_TOL) / ug.epsilon)
        upper_ok = bool(ratio.max() <= c * (1 + FLOAT_TOL))
        bl = bilipschitz_report(ug, args.sample or "all", args.seed)
        report.update(
            {
                "M": M,
                "boundary_over_density": {"min": ratio.min(), "max": ratio.max(),
                                          "lower_bound": 1 / ug.epsilon, "upper_bound": c,
                                          "tolerance": FLOAT_TOL, "passed": lower_ok and upper_ok},
                "bilipschitz": bl.to_dict(),
            }
        )
        if not (lower_ok and upper_ok and bl.passed):
            status = EXIT_BOUND
    emit(args, report)
    return status


def cmd_check_uniform(args) -> int:
    g = read_graph(args.graph)
    ug = uniformize(g, args.epsilon)
    spec = "frontier" if args.frontier_pairs else _pair_spec(args, g)
    est = estimate_domain_uniformity(ug, spec, lambda_cap=args.lambda_cap, seed=args.seed)
    payload = {
        "epsilon": ug.epsilon,
        "lambda_hat": est.lambda_hat,
        "pairs": len(est.pairs),
        "failures": [[g.names[u], g.names[v]] for u, v in est.failures],
        "max_tolerance": max(r.tolerance for r in est.reports),
    }
    emit(args, payload, est.rows(ug))
    return EXIT_BOUND if est.failures else EXIT_OK


def cmd_verify_map(args) -> int:
    gy, gx = read_graph(args.graph), read_graph(args.graph2)
    m = verify_rough_map(read_map(args.map, gy, gx))
    report: dict[str, Any] = {"map": m.to_dict()}
    status = EXIT_OK
    if m.kind == "isometry":
        inv = quasi_inverse(m)
        rt_s, rt_t = round_trip_gaps(m, inv)
        tau = m.tau
        slack = FLOAT_TOL * max(1.0, tau)
        checks = {
            "inverse_tau_le_3tau": inv.tau <= 3 * tau + slack,
            "round_trip_source_le_2tau": rt_s <= 2 * tau + slack,
            "round_trip_target_le_tau": rt_t <= tau + slack,
        }
        report["quasi_inverse"] = {"map": inv.to_dict(), "round_trip_source": rt_s,
                                   "round_trip_target": rt_t, "checks": checks,
                                   "tolerance": slack}
        if not all(checks.values()):
            status = EXIT_BOUND
    emit(args, report)
    return status


def _load_scenario(path: str) -> dict:
    base = Path(path).parent
    data = json.loads(Path(path).read_text())
    for key in ("graph", "graph2", "map", "pairs"):
        if isinstance(data.get(key), str):
            data[key] = str(base / data[key])
    return data


def cmd_transfer(args) -> int:
    if args.scenario:
        sc = _load_scenario(args.scenario)
        for key in ("graph", "graph2", "map", "epsilon", "pairs", "sample", "seed"):
            if key in sc and sc[key] is not None:
                setattr(args, key, sc[key])
    if not (args.graph and args.graph2 and args.map and args.epsilon):
        raise ParameterError("transfer needs --graph, --graph2, --map and --epsilon (or --scenario)")
    gy, gx = read_graph(args.graph), read_graph(args.graph2)
    m = verify_rough_map(read_map(args.map, gy, gx))
    ugY, ugX = uniformize(gy, args.epsilon), uniformize(gx, args.epsilon)
    if isinstance(args.pairs, list):
        pairs = [(gy.vertex(u), gy.vertex(v)) for u, v in args.pairs]
    else:
        spec = _pair_spec(args, gy)
        from .uniformize import sample_pairs

        pairs = [(u, v) for u, v in sample_pairs(gy.n, spec, args.seed) if u != v]
    results = transfer_pairs(ugY, ugX, m, pairs)
    rows = [r.to_row(gy.names) for r in results]
    payload = {"epsilon": args.epsilon, "tau": m.tau, "rows": rows}
    emit(args, payload, rows)
    return EXIT_OK if all(r.passed for r in results) else EXIT_BOUND


def cmd_counterexample(args) -> int:
    eps = args.epsilon if args.epsilon is not None else 3.0
    radii = np.arange(args.r_min, args.r_max + 0.5 * args.r_step, args.r_step)
    rows = disk.divergence_table(eps, [round(float(r), 12) for r in radii], args.a_cap)
    out = [{"R": r.R, "A_min": r.A_min, "tau_inner": r.inner, "T_outer": r.outer,
            "tolerance": 1e-12} for r in rows]
    payload = {"epsilon": eps, "rows": out, "log_slope": disk.log_slope(rows)}
    emit(args, payload, out)
    vals = [r.A_min for r in rows]
    return EXIT_OK if all(b > a for a, b in zip(vals, vals[1:])) else EXIT_BOUND


# -- comparison of artifacts -----------------------------------------------------


def _load_artifact(path: str) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return list(csv.DictReader(io.StringIO(text)))


def _flatten(obj: Any, prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, list):
        out[f"{prefix}#len"] = len(obj)
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}[{i}]"))
    else:
        out[prefix] = obj
    return out


def _as_number(v: Any):
    if isinstance(v, bool):
        return None
    if isinstance(v, (int, float)):
        return float(v)
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            return None
    return None


def compare_runs(a: Any, b: Any, rtol: float = 1e-9, atol: float = 0.0) -> list[dict]:
    """Field-wise differences between two artifacts of the same schema."""
    fa, fb = _flatten(a), _flatten(b)
    if set(fa) != set(fb):
        raise SchemaMismatch(f"artifacts differ in fields: {sorted(set(fa) ^ set(fb))[:5]}")
    diffs = []
    for key in sorted(fa):
        x, y = fa[key], fb[key]
        nx, ny = _as_number(x), _as_number(y)
        if nx is not None and ny is not None:
            if nx == ny or math.isclose(nx, ny, rel_tol=rtol, abs_tol=atol):
                continue
        elif x == y:
            continue
        diffs.append({"field": key, "a": x, "b": y})
    return diffs


def cmd_compare(args) -> int:
    diffs = compare_runs(_load_artifact(args.a), _load_artifact(args.b), args.rtol)
    emit(args, {"differences": diffs, "rtol": args.rtol})
    return EXIT_OK if not diffs else EXIT_BOUND


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph")
    common.add_argument("--graph2")
    common.add_argument("--map")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--pairs")
    common.add_argument("--sample", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", choices=["csv", "json", "edgelist"])

    p = argparse.ArgumentParser(prog="hypuni", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="write a generated graph")
    gen.add_argument("kind", choices=["tree", "comb", "grid", "path"])
    gen.add_argument("--branching", type=int, default=2)
    gen.add_argument("--depth", type=int, default=4)
    gen.add_argument("--teeth", type=int, default=3)
    gen.add_argument("--resolution", type=float, default=1.0)
    gen.add_argument("--rmax", type=float, default=4.0)
    gen.add_argument("--rings", type=int, default=8)
    gen.add_argument("--sectors", type=int, default=64)
    gen.add_argument("--perturb", type=float, help="attach pendants of this length")
    gen.add_argument("--pendant-fraction", type=float, default=1.0)
    gen.add_argument("--random-lengths", action="store_true")
    gen.add_argument("--stretch", action="store_true")
    gen.set_defaults(func=cmd_generate)

    sub.add_parser("analyze", parents=[common], help="hyperbolicity and starlikeness").set_defaults(func=cmd_analyze)
    sub.add_parser("uniformize", parents=[common], help="uniformized metric summary").set_defaults(func=cmd_uniformize)

    chk = sub.add_parser("check-uniform", parents=[common], help="uniformity of d_eps-geodesics")
    chk.add_argument("--lambda-cap", type=float)
    chk.add_argument("--frontier-pairs", action="store_true")
    chk.set_defaults(func=cmd_check_uniform)

    sub.add_parser("verify-map", parents=[common], help="measure a rough isometry").set_defaults(func=cmd_verify_map)

    tr = sub.add_parser("transfer", parents=[common], help="transfer uniform curves across a map")
    tr.add_argument("--scenario")
    tr.set_defaults(func=cmd_transfer)

    ce = sub.add_parser("counterexample", parents=[common], help="A_min(R) table for the disk")
    ce.add_argument("--r-min", type=float, default=5.0)
    ce.add_argument("--r-max", type=float, default=10.0)
    ce.add_argument("--r-step", type=float, default=1.0)
    ce.add_argument("--a-cap", type=float, default=disk.A_CAP)
    ce.set_defaults(func=cmd_counterexample)

    cmp_ = sub.add_parser("compare", parents=[common], help="diff two artifacts")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--rtol", type=float, default=1e-9)
    cmp_.set_defaults(func=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, ParameterError, MapError, TransferError, SchemaMismatch, OSError,
            json.JSONDecodeError, ValueError) as exc:
        print(f"hypuni {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
