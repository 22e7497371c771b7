"""Shared graphs and hypothesis strategies for the test suite."""

from __future__ import annotations

from hypothesis import strategies as st

from compact_layering import DiGraph, Layering


def cycle(k: int) -> DiGraph:
    return DiGraph.from_edges([(i, (i + 1) % k) for i in range(k)])


def path(k: int) -> DiGraph:
    return DiGraph.from_edges([(i, i + 1) for i in range(k - 1)], n=k)


def complete(k: int) -> DiGraph:
    return DiGraph.from_edges([(i, j) for i in range(k) for j in range(i + 1, k)])


C3 = cycle(3)
K3 = complete(3)


@st.composite
def graphs(draw, min_n=2, max_n=7, max_m=12):
    n = draw(st.integers(min_n, max_n))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda a: a[0] != a[1])
    arcs = draw(st.lists(pair, max_size=max_m))
    return DiGraph(n, tuple(arcs))


@st.composite
def layered_graphs(draw, min_n=2, max_n=7, max_m=12, slack=2):
    """A graph with a random valid layering; H >= n, so every vertex always has a free layer."""
    g = draw(graphs(min_n, max_n, max_m))
    H = draw(st.integers(max(2, g.n), max(2, g.n) + slack))
    nbrs = g.neighbors()
    layers: list[int] = []
    for v in range(g.n):
        banned = {layers[u] for u in nbrs[v] if u < v}
        layers.append(draw(st.sampled_from([k for k in range(1, H + 1) if k not in banned])))
    return g, Layering(H, tuple(layers))
