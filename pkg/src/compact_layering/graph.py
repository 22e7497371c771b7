"""Directed graphs, the plain-text instance format and the random instance generator.

Instance format (UTF-8)::

    # comment
    p <n> <m>          optional header, must precede arcs
    w <v> <width>      optional vertex width
    <tail> <head>      one arc per line

Vertex ids are decimal integers in ``[0, n)``.  Without a header, ``n`` is one
more than the largest id mentioned.
"""

from __future__ import annotations

import io
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "DiGraph",
    "GraphFormatError",
    "RandomGraphSpec",
    "degrees",
    "generate_random",
    "is_acyclic",
    "parse_edge_list",
    "read_graph",
    "simple_edges",
    "write_edge_list",
]


class GraphFormatError(ValueError):
    """Raised for malformed instance text or structurally invalid graphs."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class DiGraph:
    """Immutable directed multigraph without self-loops.

    ``vertex_width`` is ``None`` for unit widths.  Parallel arcs are kept as
    separate entries of ``arcs``.
    """

    n: int
    arcs: tuple[tuple[int, int], ...] = ()
    vertex_width: tuple[float, ...] | None = None
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphFormatError(f"negative vertex count {self.n}")
        arcs = tuple((int(u), int(v)) for u, v in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        for i, (u, v) in enumerate(arcs):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"arc {i} ({u}, {v}) has an endpoint outside [0, {self.n})")
            if u == v:
                raise GraphFormatError(f"arc {i} is a self-loop on vertex {u}")
        if self.vertex_width is not None:
            widths = tuple(float(w) for w in self.vertex_width)
            if len(widths) != self.n:
                raise GraphFormatError("vertex_width length does not match n")
            if any(not (w > 0 and math.isfinite(w)) for w in widths):
                raise GraphFormatError("vertex widths must be positive and finite")
            # all-unit widths collapse to the default so equality is structural
            object.__setattr__(self, "vertex_width", None if all(w == 1.0 for w in widths) else widths)
        if self.labels is not None:
            if len(self.labels) != self.n:
                raise GraphFormatError("labels length does not match n")
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @property
    def m(self) -> int:
        return len(self.arcs)

    @property
    def widths(self) -> tuple[float, ...] | tuple[int, ...]:
        """Per-vertex widths; integer ones when the graph uses unit widths."""
        if self.vertex_width is None:
            return (1,) * self.n
        return self.vertex_width

    @property
    def unit_width(self) -> bool:
        return self.vertex_width is None

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def neighbors(self) -> list[list[int]]:
        """Undirected adjacency lists (one entry per incident arc)."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def in_out_degrees(self) -> tuple[list[int], list[int]]:
        indeg = [0] * self.n
        outdeg = [0] * self.n
        for u, v in self.arcs:
            outdeg[u] += 1
            indeg[v] += 1
        return indeg, outdeg

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None, **kwargs) -> "DiGraph":
        arcs = tuple((int(u), int(v)) for u, v in edges)
        if n is None:
            n = 1 + max((max(a) for a in arcs), default=-1)
        return cls(n, arcs, **kwargs)


@dataclass(frozen=True)
class RandomGraphSpec:
    n: int
    density: float = 1.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("random graphs need at least 2 vertices")
        if not self.density > 0:
            raise ValueError("density must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def m(self) -> int:
        # round half up, so 1.5 * odd n is unambiguous
        return int(math.floor(self.density * self.n + 0.5))


def _parse_int(token: str, lineno: int) -> int:
    try:
        value = int(token, 10)
    except ValueError:
        raise GraphFormatError(f"expected an integer, got {token!r}", lineno) from None
    if value < 0:
        raise GraphFormatError(f"negative id {value}", lineno)
    return value


def parse_edge_list(text: str | TextIO) -> DiGraph:
    if not isinstance(text, str):
        text = text.read()
    declared_n = declared_m = None
    arcs: list[tuple[int, int]] = []
    widths: dict[int, float] = {}
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if declared_n is not None:
                raise GraphFormatError("duplicate header", lineno)
            if arcs or widths:
                raise GraphFormatError("header must precede arcs", lineno)
            if len(parts) != 3:
                raise GraphFormatError("header must read 'p <n> <m>'", lineno)
            declared_n, declared_m = _parse_int(parts[1], lineno), _parse_int(parts[2], lineno)
        elif parts[0] == "w":
            if len(parts) != 3:
                raise GraphFormatError("width line must read 'w <v> <width>'", lineno)
            v = _parse_int(parts[1], lineno)
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"bad width {parts[2]!r}", lineno) from None
            if not (w > 0 and math.isfinite(w)):
                raise GraphFormatError(f"width must be positive, got {parts[2]}", lineno)
            if declared_n is not None and v >= declared_n:
                raise GraphFormatError(f"vertex {v} exceeds declared n={declared_n}", lineno)
            widths[v] = w
            max_id = max(max_id, v)
        else:
            if len(parts) != 2:
                raise GraphFormatError(f"malformed line {line!r}", lineno)
            u, v = _parse_int(parts[0], lineno), _parse_int(parts[1], lineno)
            if u == v:
                raise GraphFormatError(f"self-loop on vertex {u}", lineno)
            if declared_n is not None and max(u, v) >= declared_n:
                raise GraphFormatError(f"vertex {max(u, v)} exceeds declared n={declared_n}", lineno)
            arcs.append((u, v))
            max_id = max(max_id, u, v)
    if declared_m is not None and declared_m != len(arcs):
        raise GraphFormatError(f"header declares {declared_m} arcs but {len(arcs)} were read")
    n = declared_n if declared_n is not None else max_id + 1
    vertex_width = None
    if widths:
        vertex_width = tuple(widths.get(v, 1.0) for v in range(n))
    return DiGraph(n, tuple(arcs), vertex_width)


def read_graph(path) -> DiGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh)


def write_edge_list(g: DiGraph) -> str:
    out = io.StringIO()
    out.write(f"p {g.n} {g.m}\n")
    if g.vertex_width is not None:
        for v, w in enumerate(g.vertex_width):
            if w != 1.0:
                out.write(f"w {v} {w!r}\n")
    for u, v in g.arcs:
        out.write(f"{u} {v}\n")
    return out.getvalue()


def generate_random(spec: RandomGraphSpec) -> DiGraph:
    """Random digraph with exactly ``spec.m`` arcs.

    Vertices are visited round-robin; each visit draws an out-degree from a
    geometric distribution on {0, 1, ...} with mean ``density`` and adds that
    many arcs to uniformly chosen other vertices, until ``m`` arcs exist.
    Cycles and parallel arcs may occur.
    """
    rng = np.random.default_rng(spec.seed)
    n, m = spec.n, spec.m
    p = 1.0 / (1.0 + spec.density)
    arcs: list[tuple[int, int]] = []
    while len(arcs) < m:
        for u in range(n):
            k = int(rng.geometric(p)) - 1
            for _ in range(k):
                if len(arcs) == m:
                    break
                t = int(rng.integers(n - 1))
                arcs.append((u, t + 1 if t >= u else t))
            if len(arcs) == m:
                break
    return DiGraph(n, tuple(arcs))


def degrees(g: DiGraph) -> tuple[list[int], int]:
    """Undirected degree per vertex (parallel arcs counted) and the maximum."""
    deg = [0] * g.n
    for u, v in g.arcs:
        deg[u] += 1
        deg[v] += 1
    return deg, max(deg, default=0)


def simple_edges(g: DiGraph) -> list[tuple[int, int]]:
    """Edges of the underlying simple undirected graph as sorted pairs."""
    return sorted({(min(u, v), max(u, v)) for u, v in g.arcs})


def is_acyclic(g: DiGraph) -> bool:
    indeg, _ = g.in_out_degrees()
    succ: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.arcs:
        succ[u].append(v)
    queue = deque(v for v in range(g.n) if indeg[v] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == g.n
