"""Finite weighted graphs as models of geodesic metric spaces.

A :class:`MetricGraph` carries a base point and a set of *frontier* vertices
that stand in for the directions to infinity of the unbounded space it
truncates.  Distances are shortest-path distances, geodesics are shortest
paths with a deterministic lexicographic tie-break.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra


class GraphError(ValueError):
    """Structural problem with a graph (disconnected, bad edge, bad vertex)."""


class ParameterError(ValueError):
    """Invalid parameter passed to a generator or analysis routine."""


# relative slack when deciding whether an edge lies on a shortest path
PATH_RTOL = 1e-9

EXHAUSTIVE_HYPERBOLICITY_MAX = 256


def _on_path(lhs: float, rhs: float) -> bool:
    return abs(lhs - rhs) <= PATH_RTOL * max(1.0, abs(rhs))


class MetricGraph:
    """Connected undirected graph with positive edge lengths.

    Vertices are addressed by integer index; ``names`` maps indices to the
    opaque tokens used in files.  Instances are immutable after construction,
    derived data (distance matrix, geodesics) is cached lazily.
    """

    def __init__(
        self,
        names: Sequence[str],
        edges: Iterable[tuple[int, int, float]],
        base: int = 0,
        frontier: Iterable[int] = (),
    ):
        self.names: tuple[str, ...] = tuple(str(n) for n in names)
        n = len(self.names)
        if n == 0:
            raise GraphError("graph has no vertices")
        if len(set(self.names)) != n:
            raise GraphError("duplicate vertex names")
        self.index = {name: i for i, name in enumerate(self.names)}

        weights: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise GraphError(f"self-loop at vertex {self.names[u]}")
            if not (w > 0 and math.isfinite(w)):
                raise GraphError(f"edge ({self.names[u]}, {self.names[v]}) has non-positive length {w}")
            key = (u, v) if u < v else (v, u)
            # parallel edges: only the shortest matters for the length metric
            weights[key] = min(w, weights.get(key, math.inf))
        self._weights = weights
        self.edges: tuple[tuple[int, int, float], ...] = tuple(
            (u, v, w) for (u, v), w in sorted(weights.items())
        )

        if not 0 <= int(base) < n:
            raise GraphError(f"base vertex {base} out of range")
        self.base = int(base)
        self.frontier: tuple[int, ...] = tuple(sorted({int(f) for f in frontier}))

        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        self.adjacency: tuple[tuple[tuple[int, float], ...], ...] = tuple(
            tuple(sorted(a)) for a in adj
        )
        for f in self.frontier:
            if not 0 <= f < n:
                raise GraphError(f"frontier vertex {f} out of range")
            if not self.adjacency[f] and n > 1:
                raise GraphError(f"frontier vertex {self.names[f]} has degree 0")

        if n > 1:
            ncomp, _ = connected_components(self.sparse(), directed=False)
            if ncomp != 1:
                raise GraphError(f"graph is disconnected ({ncomp} components)")

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_named_edges(
        cls,
        edges: Iterable[tuple[str, str, float]],
        base: str | None = None,
        frontier: Iterable[str] = (),
        vertices: Iterable[str] = (),
    ) -> "MetricGraph":
        names: dict[str, int] = {}

        def idx(name: str) -> int:
            name = str(name)
            if name not in names:
                names[name] = len(names)
            return names[name]

        for v in vertices:
            idx(v)
        triples = [(idx(u), idx(v), float(w)) for u, v, w in edges]
        order = sorted(names, key=names.get)
        if base is None:
            b = 0
        elif str(base) in names:
            b = names[str(base)]
        else:
            raise GraphError(f"base vertex {base!r} is not in the graph")
        fr = []
        for f in frontier:
            if str(f) not in names:
                raise GraphError(f"frontier vertex {f!r} is not in the graph")
            fr.append(names[str(f)])
        return cls(order, triples, base=b, frontier=fr)

    def with_frontier(self, frontier: Iterable[int]) -> "MetricGraph":
        return MetricGraph(self.names, self.edges, self.base, frontier)

    def with_base(self, base: int) -> "MetricGraph":
        return MetricGraph(self.names, self.edges, base, self.frontier)

    # -- basic queries --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return (
            f"MetricGraph(n={self.n}, edges={len(self.edges)}, "
            f"base={self.names[self.base]!r}, frontier={len(self.frontier)})"
        )

    def vertex(self, v: int | str) -> int:
        """Resolve a vertex given either by index or by name."""
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            if not 0 <= int(v) < self.n:
                raise GraphError(f"vertex {v} out of range")
            return int(v)
        try:
            return self.index[str(v)]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def edge_length(self, u: int, v: int) -> float:
        key = (u, v) if u < v else (v, u)
        try:
            return self._weights[key]
        except KeyError:
            raise GraphError(f"no edge between {self.names[u]} and {self.names[v]}") from None

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._weights

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_edge_length(self) -> float:
        return max((w for _, _, w in self.edges), default=0.0)

    @property
    def min_edge_length(self) -> float:
        return min((w for _, _, w in self.edges), default=0.0)

    def sparse(self, weights: Sequence[float] | None = None) -> csr_matrix:
        """Symmetric sparse adjacency matrix, optionally with replacement weights."""
        if not self.edges:
            return csr_matrix((self.n, self.n))
        u = np.array([e[0] for e in self.edges])
        v = np.array([e[1] for e in self.edges])
        w = np.array([e[2] for e in self.edges] if weights is None else weights, dtype=float)
        return csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(self.n, self.n),
        )

    @cached_property
    def dist(self) -> np.ndarray:
        """All-pairs shortest-path distance matrix."""
        d = dijkstra(self.sparse(), directed=False)
        # the two summation orders can differ in the last ulp
        d = np.minimum(d, d.T)
        d.setflags(write=False)
        return d

    @cached_property
    def dist_to_base(self) -> np.ndarray:
        return self.dist[self.base]

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max())

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.names),
            "edges": [[self.names[u], self.names[v], w] for u, v, w in self.edges],
            "base": self.names[self.base],
            "frontier": [self.names[f] for f in self.frontier],
        }


@dataclass(frozen=True)
class Curve:
    """Edge path with cumulative arclength.

    ``cumulative[i]`` is the length of the curve from ``vertices[0]`` to
    ``vertices[i]``; together they parametrize the curve by arclength.
    """

    vertices: tuple[int, ...]
    cumulative: tuple[float, ...]

    def __post_init__(self):
        if not self.vertices:
            raise GraphError("curve needs at least one vertex")
        if len(self.vertices) != len(self.cumulative):
            raise GraphError("curve vertices and cumulative lengths differ in size")

    @classmethod
    def from_vertices(cls, g: MetricGraph, vertices: Sequence[int]) -> "Curve":
        verts = tuple(int(v) for v in vertices)
        cum = [0.0]
        for a, b in zip(verts, verts[1:]):
            if not g.has_edge(a, b):
                raise GraphError(
                    f"curve is not edge-consistent: no edge {g.names[a]}-{g.names[b]}"
                )
            cum.append(cum[-1] + g.edge_length(a, b))
        return cls(verts, tuple(cum))

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices)

    def reversed(self) -> "Curve":
        total = self.length
        return Curve(self.vertices[::-1], tuple(total - c for c in self.cumulative[::-1]))

    def concat(self, other: "Curve") -> "Curve":
        if other.start != self.end:
            raise GraphError("curves do not share an endpoint")
        shift = self.length
        return Curve(
            self.vertices + other.vertices[1:],
            self.cumulative + tuple(c + shift for c in other.cumulative[1:]),
        )

    def check(self, g: MetricGraph, atol: float = 1e-9) -> None:
        """Raise if the stored lengths disagree with the graph's edges."""
        for i, (a, b) in enumerate(zip(self.vertices, self.vertices[1:])):
            step = self.cumulative[i + 1] - self.cumulative[i]
            if abs(step - g.edge_length(a, b)) > atol * max(1.0, step):
                raise GraphError(f"cumulative length mismatch on edge {i}")


def lex_shortest_path(
    adjacency: Sequence[Sequence[tuple[int, float]]], dist_row_to_target: np.ndarray, u: int, v: int
) -> list[int]:
    """Lexicographically smallest shortest path from ``u`` to ``v``.

    ``dist_row_to_target[w]`` must be the shortest distance from ``w`` to
    ``v`` in the metric defined by ``adjacency``.  At each step the smallest
    neighbour index that stays on a shortest path is taken.
    """
    path = [u]
    cur = u
    guard = len(adjacency) + 1
    while cur != v:
        remaining = dist_row_to_target[cur]
        for nb, w in adjacency[cur]:
            if _on_path(w + dist_row_to_target[nb], remaining):
                cur = nb
                break
        else:
            raise GraphError("no shortest-path successor found (inconsistent distances)")
        path.append(cur)
        guard -= 1
        if guard < 0:
            raise GraphError("shortest-path walk did not terminate")
    return path


def shortest_dist(g: MetricGraph, u: int | str, v: int | str) -> float:
    return float(g.dist[g.vertex(u), g.vertex(v)])


def geodesic(g: MetricGraph, u: int | str, v: int | str) -> Curve:
    """Shortest path from u to v, lexicographically smallest among ties."""
    u, v = g.vertex(u), g.vertex(v)
    return Curve.from_vertices(g, lex_shortest_path(g.adjacency, g.dist[v], u, v))


def gromov_product(g: MetricGraph, x: int | str, y: int | str, w: int | str) -> float:
    x, y, w = g.vertex(x), g.vertex(y), g.vertex(w)
    d = g.dist
    return 0.5 * float(d[x, w] + d[y, w] - d[x, y])


# -- hyperbolicity ----------------------------------------------------------


@dataclass
class HyperbolicityReport:
    delta_thin: float
    delta_four_point: float
    thin_witness: tuple[int, int, int]
    four_point_witness: tuple[int, int, int, int]
    sampled: bool
    samples: int
    # vertices of the chosen geodesics are the only sample points
    vertex_sampling_error: float
    note: str = (
        "thinness is measured for the lexicographic geodesic selection only; "
        "sampled mode gives lower bounds"
    )

    def to_dict(self) -> dict:
        return {
            "delta_thin": self.delta_thin,
            "delta_four_point": self.delta_four_point,
            "thin_witness": list(self.thin_witness),
            "four_point_witness": list(self.four_point_witness),
            "sampled": self.sampled,
            "samples": self.samples,
            "vertex_sampling_error": self.vertex_sampling_error,
            "note": self.note,
        }


class GeodesicCache:
    """Lazily computed lexicographic geodesics and distances to their vertex sets."""

    def __init__(self, g: MetricGraph):
        self.g = g
        self._paths: dict[tuple[int, int], tuple[int, ...]] = {}
        self._near: dict[tuple[int, int], np.ndarray] = {}

    def path(self, a: int, b: int) -> tuple[int, ...]:
        key = (a, b)
        p = self._paths.get(key)
        if p is None:
            p = tuple(lex_shortest_path(self.g.adjacency, self.g.dist[b], a, b))
            self._paths[key] = p
        return p

    def dist_to_side(self, a: int, b: int) -> np.ndarray:
        """Distance from every vertex to the vertex set of geodesic [a, b]."""
        key = (a, b)
        r = self._near.get(key)
        if r is None:
            r = self.g.dist[:, list(self.path(a, b))].min(axis=1)
            self._near[key] = r
        return r


def triangle_thinness(g: MetricGraph, x: int, y: int, z: int, cache: GeodesicCache | None = None) -> float:
    """max over vertices p of [x,y] of the distance from p to [y,z] ∪ [z,x]."""
    cache = cache or GeodesicCache(g)
    side = list(cache.path(x, y))
    other = np.minimum(cache.dist_to_side(y, z), cache.dist_to_side(z, x))
    return float(other[side].max())


def four_point_deficit(g: MetricGraph, x: int, y: int, z: int, w: int) -> float:
    """min((x|z)_w, (z|y)_w) - (x|y)_w."""
    d = g.dist

    def gp(a, b):
        return 0.5 * (d[a, w] + d[b, w] - d[a, b])

    return float(min(gp(x, z), gp(z, y)) - gp(x, y))


def _thin_exhaustive(g: MetricGraph) -> tuple[float, tuple[int, int, int]]:
    n = g.n
    cache = GeodesicCache(g)
    # near[a, b, p] = dist(p, vertex set of geodesic [a, b])
    near = np.empty((n, n, n))
    for a in range(n):
        for b in range(n):
            near[a, b] = cache.dist_to_side(a, b)
    best, wit = 0.0, (0, 0, 0)
    for x in range(n):
        for y in range(n):
            side = list(cache.path(x, y))
            if len(side) <= 1:
                continue
            # rows: z, columns: points p of [x, y]
            vals = np.minimum(near[y, :, :][:, side], near[:, x, :][:, side]).max(axis=1)
            z = int(vals.argmax())
            if vals[z] > best:
                best, wit = float(vals[z]), (x, y, z)
    return best, wit


def _four_point_exhaustive(g: MetricGraph) -> tuple[float, tuple[int, int, int, int]]:
    d = g.dist
    best, wit = 0.0, (0, 0, 0, 0)
    for w in range(g.n):
        gp = 0.5 * (d[:, w][:, None] + d[w, :][None, :] - d)
        # deficit[x, y, z] = min(gp[x, z], gp[z, y]) - gp[x, y]
        deficit = np.minimum(gp[:, None, :], gp.T[None, :, :]) - gp[:, :, None]
        k = int(deficit.argmax())
        val = float(deficit.flat[k])
        if val > best:
            x, y, z = np.unravel_index(k, deficit.shape)
            best, wit = val, (int(x), int(y), int(z), w)
    return best, wit


def hyperbolicity(
    g: MetricGraph, mode: str = "exhaustive", samples: int | None = None, seed: int = 0
) -> HyperbolicityReport:
    """Thin-triangle and four-point hyperbolicity constants.

    ``mode`` is ``"exhaustive"`` or ``"sampled"``; sampled mode draws
    ``samples`` random triples and quadruples and reports lower bounds.
    """
    err = 0.5 * g.max_edge_length
    if mode == "exhaustive":
        if g.n > EXHAUSTIVE_HYPERBOLICITY_MAX:
            raise ParameterError(
                f"exhaustive hyperbolicity limited to {EXHAUSTIVE_HYPERBOLICITY_MAX} vertices; use sampled mode"
            )
        thin, tw = _thin_exhaustive(g)
        four, fw = _four_point_exhaustive(g)
        return HyperbolicityReport(thin, four, tw, fw, False, 0, err)
    if mode != "sampled":
        raise ParameterError(f"unknown hyperbolicity mode {mode!r}")
    if samples is None or samples <= 0:
        raise ParameterError("sampled mode needs a positive sample count")
    rng = np.random.default_rng(seed)
    cache = GeodesicCache(g)
    thin, tw = 0.0, (0, 0, 0)
    for x, y, z in rng.integers(0, g.n, size=(samples, 3)):
        val = triangle_thinness(g, int(x), int(y), int(z), cache)
        if val > thin:
            thin, tw = val, (int(x), int(y), int(z))
    four, fw = 0.0, (0, 0, 0, 0)
    for x, y, z, w in rng.integers(0, g.n, size=(samples, 4)):
        val = four_point_deficit(g, int(x), int(y), int(z), int(w))
        if val > four:
            four, fw = val, (int(x), int(y), int(z), int(w))
    return HyperbolicityReport(thin, four, tw, fw, True, samples, err)


# -- starlikeness -----------------------------------------------------------


@dataclass
class StarlikenessReport:
    M: float
    rays: list[Curve]
    witness: int

    def to_dict(self, g: MetricGraph | None = None) -> dict:
        name = (lambda v: g.names[v]) if g is not None else (lambda v: v)
        return {
            "M": self.M,
            "witness": name(self.witness),
            "rays": [[name(v) for v in r.vertices] for r in self.rays],
        }


def distance_to_rays(g: MetricGraph) -> np.ndarray:
    if not g.frontier:
        raise ParameterError("unbounded directions unspecified: graph has an empty frontier")
    ray_vertices = sorted({v for f in g.frontier for v in geodesic(g, g.base, f).vertices})
    return g.dist[:, ray_vertices].min(axis=1)


def starlikeness(g: MetricGraph) -> StarlikenessReport:
    """Rough starlikeness constant M relative to the geodesics base → frontier."""
    if not g.frontier:
        raise ParameterError("unbounded directions unspecified: graph has an empty frontier")
    rays = [geodesic(g, g.base, f) for f in g.frontier]
    near = distance_to_rays(g)
    w = int(near.argmax())
    return StarlikenessReport(float(near[w]), rays, w)


# -- generators -------------------------------------------------------------


def gen_tree(branching: int, depth: int) -> MetricGraph:
    """Rooted tree with unit edges; base is the root, frontier the leaves."""
    if branching < 2 or depth < 1:
        raise ParameterError("gen_tree needs branching >= 2 and depth >= 1")
    edges = []
    level = [0]
    count = 1
    for _ in range(depth):
        nxt = []
        for parent in level:
            for _ in range(branching):
                edges.append((parent, count, 1.0))
                nxt.append(count)
                count += 1
        level = nxt
    return MetricGraph([str(i) for i in range(count)], edges, base=0, frontier=level)


def gen_path(length: int, edge: float = 1.0) -> MetricGraph:
    """Discretized ray [0, length·edge]; base at 0, frontier at the far end."""
    if length < 1:
        raise ParameterError("gen_path needs at least one edge")
    edges = [(i, i + 1, edge) for i in range(length)]
    return MetricGraph([str(i) for i in range(length + 1)], edges, base=0, frontier=[length])


def _steps(length: float, resolution: float) -> int:
    k = length / resolution
    r = round(k)
    if r < 1 or abs(k - r) > 1e-9 * max(1.0, k):
        raise ParameterError(f"resolution {resolution} does not divide length {length}")
    return int(r)


def gen_comb(n_teeth: int, resolution: float = 1.0) -> MetricGraph:
    """Spine [0, n_teeth+1] with a vertical tooth of length n at each integer n.

    Vertices sit every ``resolution``; base is the spine origin, frontier is
    the spine end plus every tooth tip.
    """
    if n_teeth < 1:
        raise ParameterError("gen_comb needs at least one tooth")
    if not resolution > 0:
        raise ParameterError("resolution must be positive")
    per_unit = _steps(1.0, resolution)
    h = 1.0 / per_unit
    names: list[str] = []
    edges: list[tuple[int, int, float]] = []

    def add(name: str) -> int:
        names.append(name)
        return len(names) - 1

    spine_len = (n_teeth + 1) * per_unit
    spine = [add(f"s{k}") for k in range(spine_len + 1)]
    for a, b in zip(spine, spine[1:]):
        edges.append((a, b, h))
    tips = []
    for tooth in range(1, n_teeth + 1):
        prev = spine[tooth * per_unit]
        for k in range(1, tooth * per_unit + 1):
            cur = add(f"t{tooth}_{k}")
            edges.append((prev, cur, h))
            prev = cur
        tips.append(prev)
    return MetricGraph(names, edges, base=spine[0], frontier=[spine[-1], *tips])


def ring_edge_length(radius: float, n_sectors: int) -> float:
    return (math.pi * (math.exp(2 * radius) - math.exp(-2 * radius)) / 2) / n_sectors


def gen_hyperbolic_grid(R_max: float, n_rings: int, n_sectors: int) -> MetricGraph:
    """Polar discretization of the hyperbolic disk.

    Ring i sits at hyperbolic radius i·R_max/n_rings; the circle of radius R
    has length (π/2)(e^{2R} − e^{−2R}), split evenly into ``n_sectors`` edges.
    """
    if not R_max > 0 or n_rings < 2 or n_sectors < 3:
        raise ParameterError("gen_hyperbolic_grid needs R_max > 0, n_rings >= 2, n_sectors >= 3")
    dr = R_max / n_rings
    names = ["c"]
    edges = []

    def vid(ring: int, sector: int) -> int:
        return 1 + (ring - 1) * n_sectors + sector

    for ring in range(1, n_rings + 1):
        for s in range(n_sectors):
            names.append(f"r{ring}_{s}")
    for ring in range(1, n_rings + 1):
        circ = ring_edge_length(ring * dr, n_sectors)
        for s in range(n_sectors):
            inner = 0 if ring == 1 else vid(ring - 1, s)
            edges.append((inner, vid(ring, s), dr))
            edges.append((vid(ring, s), vid(ring, (s + 1) % n_sectors), circ))
    frontier = [vid(n_rings, s) for s in range(n_sectors)]
    return MetricGraph(names, edges, base=0, frontier=frontier)


def scale(g: MetricGraph, factor: float) -> MetricGraph:
    """Same graph with every edge length multiplied by ``factor``."""
    if not factor > 0:
        raise ParameterError("scale factor must be positive")
    return MetricGraph(g.names, [(u, v, w * factor) for u, v, w in g.edges], g.base, g.frontier)


def subdivide(g: MetricGraph, h_max: float) -> MetricGraph:
    """Split every edge into equal pieces of length at most ``h_max``."""
    if not h_max > 0:
        raise ParameterError("h_max must be positive")
    names = list(g.names)
    edges = []
    for u, v, w in g.edges:
        k = max(1, math.ceil(w / h_max - 1e-12))
        prev = u
        for j in range(1, k):
            names.append(f"{g.names[u]}~{g.names[v]}~{j}")
            cur = len(names) - 1
            edges.append((prev, cur, w / k))
            prev = cur
        edges.append((prev, v, w / k))
    return MetricGraph(names, edges, g.base, g.frontier)


@dataclass
class Perturbation:
    graph: MetricGraph
    mapping: np.ndarray
    tau_bound: float
    pendants: dict[int, int] = field(default_factory=dict)


def perturb(
    g: MetricGraph,
    magnitude: float,
    seed: int = 0,
    *,
    pendant_fraction: float = 1.0,
    random_lengths: bool = False,
    stretch: bool = False,
) -> Perturbation:
    """Roughly isometric copy of ``g`` together with the inclusion map.

    Pendant edges of length ``magnitude`` (or uniform in (0, magnitude] when
    ``random_lengths``) are attached to a ``pendant_fraction`` share of the
    vertices; with ``stretch`` every edge is also multiplied by a factor in
    [1, 1 + magnitude/diameter].  The inclusion is a rough isometry with
    τ ≤ magnitude, reported as ``tau_bound``.
    """
    if magnitude < 0:
        raise ParameterError("magnitude must be non-negative")
    if not 0.0 <= pendant_fraction <= 1.0:
        raise ParameterError("pendant_fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    mapping = np.arange(g.n)
    if magnitude == 0:
        return Perturbation(g, mapping, 0.0)

    edges = list(g.edges)
    if stretch and g.diameter > 0:
        factors = 1.0 + rng.uniform(0.0, magnitude / g.diameter, size=len(edges))
        edges = [(u, v, w * f) for (u, v, w), f in zip(edges, factors)]

    names = list(g.names)
    taken = set(names)
    pendants = {}
    attach = rng.random(g.n) < pendant_fraction if pendant_fraction < 1.0 else np.ones(g.n, bool)
    lengths = magnitude * (1.0 - rng.random(g.n)) if random_lengths else np.full(g.n, magnitude)
    for v in range(g.n):
        if attach[v]:
            name = f"{g.names[v]}'"
            while name in taken:
                name += "'"
            taken.add(name)
            names.append(name)
            pendants[len(names) - 1] = v
            edges.append((v, len(names) - 1, float(lengths[v])))
    h = MetricGraph(names, edges, g.base, g.frontier)
    return Perturbation(h, mapping, float(magnitude), pendants)
