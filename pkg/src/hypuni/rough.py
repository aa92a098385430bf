"""Rough isometries and rough similarities between metric graphs.

All constants are measured exhaustively: a :class:`RoughMap` is created
with a vertex map and a kind, and :func:`verify_rough_map` fills in the
distortion and density constants.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .graph import GraphError, MetricGraph

TIE_RTOL = 1e-12


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class RoughMap:
    source: MetricGraph
    target: MetricGraph
    mapping: np.ndarray
    kind: str = "isometry"
    L: float = 1.0
    tau_distortion: float | None = None
    tau_density: float | None = None
    declared_tau: float | None = None

    @property
    def verified(self) -> bool:
        return self.tau_distortion is not None and self.tau_density is not None

    @property
    def tau(self) -> float:
        """For isometries max(distortion, density); for similarities this is C."""
        if self.declared_tau is not None:
            return self.declared_tau
        if not self.verified:
            raise MapError("map has not been verified")
        return max(self.tau_distortion, self.tau_density)

    @property
    def C(self) -> float:
        return self.tau

    def __call__(self, v: int) -> int:
        return int(self.mapping[v])

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "L": self.L,
            "tau_distortion": self.tau_distortion,
            "tau_density": self.tau_density,
            "tau": self.tau if self.verified else None,
        }


def identity_map(g: MetricGraph) -> RoughMap:
    return RoughMap(g, g, np.arange(g.n))


def _check_total(m: RoughMap) -> np.ndarray:
    mp = np.asarray(m.mapping)
    if mp.shape != (m.source.n,):
        raise MapError(f"map defines {mp.size} images for {m.source.n} source vertices")
    if mp.size and (mp.min() < 0 or mp.max() >= m.target.n):
        raise MapError("map sends a vertex outside the target graph")
    return mp.astype(int)


def distortion(m: RoughMap) -> float:
    mp = _check_total(m)
    dy = m.source.dist
    dx = m.target.dist[np.ix_(mp, mp)]
    return float(np.abs(dx - m.L * dy).max())


def density_gap(m: RoughMap) -> float:
    """Largest distance from a target vertex to the image of the map."""
    mp = _check_total(m)
    return float(m.target.dist[:, np.unique(mp)].min(axis=1).max())


def verify_rough_map(m: RoughMap) -> RoughMap:
    if m.kind not in ("isometry", "similarity"):
        raise MapError(f"unknown map kind {m.kind!r}")
    if m.kind == "isometry" and m.L != 1.0:
        raise MapError("isometry kind requires L = 1")
    return replace(m, mapping=_check_total(m), tau_distortion=distortion(m),
                   tau_density=density_gap(m), declared_tau=None)


def is_rough_isometry(m: RoughMap) -> bool:
    return m.kind == "isometry" and m.L == 1.0


def quasi_inverse(m: RoughMap) -> RoughMap:
    """Map target → source sending x to a nearest preimage of x.

    Among source vertices whose image is closest to x the smallest index wins.
    """
    if not m.verified:
        raise MapError("quasi_inverse needs a verified map")
    if not is_rough_isometry(m):
        raise MapError("quasi_inverse is defined for rough isometries")
    mp = np.asarray(m.mapping)
    dx = m.target.dist[:, mp]  # [x, y] = d(x, Φ(y))
    best = dx.min(axis=1, keepdims=True)
    close = dx <= best + TIE_RTOL * np.maximum(1.0, best)
    inv = close.argmax(axis=1)
    return verify_rough_map(RoughMap(m.target, m.source, inv))


def round_trip_gaps(m: RoughMap, inv: RoughMap) -> tuple[float, float]:
    """(max_y d(y, Φ⁻¹Φy), max_x d(x, ΦΦ⁻¹x))."""
    mp, ip = np.asarray(m.mapping), np.asarray(inv.mapping)
    src = m.source.dist[np.arange(m.source.n), ip[mp]].max()
    tgt = m.target.dist[np.arange(m.target.n), mp[ip]].max()
    return float(src), float(tgt)


def roughen(m: RoughMap) -> RoughMap:
    """Declare the constant 3τ, shared by m and its quasi-inverse."""
    if not m.verified:
        raise MapError("roughen needs a verified map")
    return replace(m, declared_tau=3.0 * max(m.tau_distortion, m.tau_density))


def compose(second: RoughMap, first: RoughMap) -> RoughMap:
    if first.target is not second.source and first.target.names != second.source.names:
        raise MapError("maps are not composable")
    mp = np.asarray(second.mapping)[np.asarray(first.mapping)]
    return verify_rough_map(RoughMap(first.source, second.target, mp, "isometry"))


def density_distortion(m: RoughMap) -> float:
    """max_y |d(Φ(y), base_X) − d(y, base_Y)|: the additive error seen by ρ."""
    mp = np.asarray(m.mapping)
    return float(np.abs(m.target.dist_to_base[mp] - m.source.dist_to_base).max())


# -- map files --------------------------------------------------------------


def format_map(m: RoughMap) -> str:
    lines = [f"kind {m.kind}"]
    if m.kind == "similarity":
        lines.append(f"L {m.L!r}")
    if m.verified:
        lines.append(f"tau {m.tau!r}")
    src, tgt = m.source.names, m.target.names
    lines += [f"{src[y]} {tgt[int(x)]}" for y, x in enumerate(m.mapping)]
    return "\n".join(lines) + "\n"


def parse_map(text: str, source: MetricGraph, target: MetricGraph) -> RoughMap:
    kind, L = "isometry", 1.0
    images: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "kind":
            kind = parts[1]
            continue
        if parts[0] in ("L", "tau", "C"):
            if parts[0] == "L":
                L = float(parts[1])
            continue
        if len(parts) != 2:
            raise MapError(f"line {lineno}: expected 'source target', got {line!r}")
        try:
            images[source.vertex(parts[0])] = target.vertex(parts[1])
        except GraphError as exc:
            raise MapError(f"line {lineno}: {exc}") from None
    missing = [source.names[v] for v in range(source.n) if v not in images]
    if missing:
        raise MapError(f"map is not total; missing {missing[:5]}")
    mp = np.array([images[v] for v in range(source.n)])
    return RoughMap(source, target, mp, kind=kind, L=L)


def read_map(path: str | os.PathLike, source: MetricGraph, target: MetricGraph) -> RoughMap:
    return parse_map(Path(path).read_text(), source, target)


def write_map(m: RoughMap, path: str | os.PathLike) -> None:
    Path(path).write_text(format_map(m))
