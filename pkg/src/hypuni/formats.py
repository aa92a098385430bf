"""Text edge-list format for graphs.

::

    # comment
    base a
    frontier c d
    a b 1.0
    b c 2.5

Vertex names are opaque whitespace-free tokens.  ``base`` defaults to the
first vertex seen; ``frontier`` lines accumulate.
"""
from __future__ import annotations

import os
from pathlib import Path

from .graph import GraphError, MetricGraph


class FormatError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def parse_graph(text: str) -> MetricGraph:
    edges = []
    base = None
    frontier: list[str] = []
    vertices: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "base":
            if len(parts) != 2:
                raise FormatError("expected 'base <vertex>'", lineno)
            base = parts[1]
        elif key == "frontier":
            frontier.extend(parts[1:])
        elif key == "vertex":
            vertices.extend(parts[1:])
        elif key == "epsilon":
            # header of uniformized exports; the extra column is ignored on import
            continue
        else:
            if len(parts) not in (3, 4):
                raise FormatError(f"expected 'u v length', got {line!r}", lineno)
            try:
                w = float(parts[2])
            except ValueError:
                raise FormatError(f"edge length {parts[2]!r} is not a number", lineno) from None
            if not w > 0:
                raise FormatError(f"edge length must be positive, got {w}", lineno)
            if parts[0] == parts[1]:
                raise FormatError(f"self-loop at {parts[0]}", lineno)
            edges.append((parts[0], parts[1], w))
    if not edges and not vertices:
        raise FormatError("no edges found")
    try:
        return MetricGraph.from_named_edges(edges, base=base, frontier=frontier, vertices=vertices)
    except FormatError:
        raise
    except GraphError as exc:
        raise FormatError(str(exc)) from None


def read_graph(path: str | os.PathLike) -> MetricGraph:
    return parse_graph(Path(path).read_text())


def format_graph(g: MetricGraph, extra: dict[tuple[int, int], float] | None = None,
                 header: dict[str, float] | None = None) -> str:
    """Serialize ``g``; floats use ``repr`` so a round trip is exact."""
    lines = []
    for key, val in (header or {}).items():
        lines.append(f"{key} {val!r}")
    lines.append(f"base {g.names[g.base]}")
    if g.frontier:
        lines.append("frontier " + " ".join(g.names[f] for f in g.frontier))
    isolated = [g.names[v] for v in range(g.n) if g.degree(v) == 0]
    if isolated:
        lines.append("vertex " + " ".join(isolated))
    for u, v, w in g.edges:
        row = f"{g.names[u]} {g.names[v]} {w!r}"
        if extra is not None:
            row += f" {extra[(u, v)]!r}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_graph(g: MetricGraph, path: str | os.PathLike, **kwargs) -> None:
    Path(path).write_text(format_graph(g, **kwargs))
