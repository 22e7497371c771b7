"""Choosing the height bound H.

A layering with adjacent vertices on distinct layers is a proper colouring of
the underlying undirected graph, so any H at least the chromatic number is
feasible.  This module provides cheap certified upper bounds on that number
(maximum degree + 1, the adjacency spectral radius + 1) and the default
height ``ceil(1.6 * sqrt(n))`` used for experiments.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import DiGraph, simple_edges
from .layering import Layering

__all__ = [
    "HeightBounds",
    "degree_bound",
    "default_height",
    "greedy_coloring",
    "greedy_layering",
    "height_bounds",
    "spectral_bound",
]

SPECTRAL_TOL = 1e-9


@dataclass(frozen=True)
class HeightBounds:
    default_h: int
    degree_bound: int
    spectral_lambda: float
    spectral_bound: int
    perron_lower: float

    def to_dict(self) -> dict:
        return asdict(self)


def default_height(n: int) -> int:
    """Smallest integer h with h >= 1.6 * sqrt(n), i.e. 25 h^2 >= 64 n."""
    if n < 1:
        raise ValueError("n must be positive")
    h = math.isqrt(64 * n // 25)
    while 25 * h * h < 64 * n:
        h += 1
    while h > 0 and 25 * (h - 1) ** 2 >= 64 * n:
        h -= 1
    # ceil(1.6) = 2 already; the clamp only documents the floor for tiny graphs
    return max(h, 2 if n >= 2 else 1)


def _simple_adjacency(g: DiGraph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in simple_edges(g):
        adj[u].add(v)
        adj[v].add(u)
    return adj


def degree_bound(g: DiGraph) -> int:
    """Maximum degree of the simple underlying graph plus one."""
    adj = _simple_adjacency(g)
    return 1 + max((len(a) for a in adj), default=0)


def _components(adj: list[set[int]]) -> list[list[int]]:
    seen = [False] * len(adj)
    comps = []
    for s in range(len(adj)):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _component_radius(A: np.ndarray, tol: float, max_iters: int) -> tuple[float, float]:
    """Rayleigh estimate and Collatz-Wielandt upper bound of the spectral radius.

    Iterates with ``A + I`` so bipartite components (spectrum symmetric about
    zero) still converge from the all-ones start.
    """
    x = np.ones(A.shape[0])
    x /= np.linalg.norm(x)
    prev = -np.inf
    rq = 0.0
    for _ in range(max_iters):
        ax = A @ x
        rq = float(x @ ax)
        if abs(rq - prev) < tol:
            break
        prev = rq
        y = ax + x
        x = y / np.linalg.norm(y)
    ax = A @ x
    upper = float(np.max(ax / x))
    return rq, upper


def spectral_bound(g: DiGraph, tol: float = SPECTRAL_TOL, max_iters: int | None = None) -> tuple[float, int]:
    """Estimate the largest adjacency eigenvalue and return ``(lambda, bound)``.

    The bound uses the Collatz-Wielandt upper estimate rather than the Rayleigh
    quotient, and the integrality of the chromatic number, so it never
    undercuts ``1 + lambda`` even when the iteration stops early.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if max_iters is None:
        max_iters = 10 * g.n + 1000
    adj = _simple_adjacency(g)
    lam = 0.0
    lam_upper = 0.0
    for comp in _components(adj):
        if len(comp) == 1:
            continue
        index = {v: i for i, v in enumerate(comp)}
        A = np.zeros((len(comp), len(comp)))
        for v in comp:
            for u in adj[v]:
                A[index[v], index[u]] = 1.0
        est, upper = _component_radius(A, tol, max_iters)
        lam = max(lam, est)
        lam_upper = max(lam_upper, upper)
    delta = max((len(a) for a in adj), default=0)
    lam_upper = min(max(lam_upper, lam), float(delta))
    bound = int(math.floor(1.0 + lam_upper + tol))
    return lam, bound


def height_bounds(g: DiGraph) -> HeightBounds:
    lam, sb = spectral_bound(g)
    m_simple = len(simple_edges(g))
    return HeightBounds(
        default_h=default_height(max(g.n, 1)),
        degree_bound=degree_bound(g),
        spectral_lambda=lam,
        spectral_bound=sb,
        perron_lower=2.0 * m_simple / g.n if g.n else 0.0,
    )


def greedy_coloring(g: DiGraph) -> list[int]:
    """Largest-degree-first greedy colouring; colours are 1-based.

    Uses at most ``degree_bound(g)`` colours.
    """
    adj = _simple_adjacency(g)
    order = sorted(range(g.n), key=lambda v: (-len(adj[v]), v))
    color = [0] * g.n
    for v in order:
        taken = {color[u] for u in adj[v]}
        c = 1
        while c in taken:
            c += 1
        color[v] = c
    return color


def greedy_layering(g: DiGraph, height: int) -> Layering | None:
    """A feasible layering from greedy colouring, or None if it needs more than ``height`` layers."""
    color = greedy_coloring(g)
    if max(color, default=1) > height:
        return None
    return Layering(height, tuple(color) if color else ())
