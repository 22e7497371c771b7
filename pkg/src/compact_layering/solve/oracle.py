"""Exhaustive reference solver.

Enumerates layer vectors in lexicographic order (vertex 0 most significant),
discarding those that put the two ends of an arc on one layer, and keeps the
first minimiser.  Everything is recomputed here from the raw arrays so the
oracle stays independent of the metric code it is used to check.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np

from ..graph import DiGraph
from ..layering import Layering
from ..objective import Objective, Weights, exact
from .result import SolveResult, Status

__all__ = ["OracleCapExceeded", "brute_force"]

# rows handled per vectorised block
_BLOCK = 1 << 16


class OracleCapExceeded(ValueError):
    pass


def _lcm_den(values) -> int:
    d = 1
    for x in values:
        d = math.lcm(d, Fraction(x).denominator)
    return d


def _prefixes(n_prefix: int, H: int, adj_before: list[list[int]]):
    """Valid partial assignments of vertices [0, n_prefix) in lexicographic order."""
    cur = [0] * n_prefix

    def rec(i):
        if i == n_prefix:
            yield tuple(cur)
            return
        for k in range(1, H + 1):
            if all(cur[u] != k for u in adj_before[i]):
                cur[i] = k
                yield from rec(i + 1)

    yield from rec(0)


def brute_force(
    g: DiGraph,
    height: int,
    objective: Objective = Objective.CGLP,
    w: Weights | None = None,
    cap: int = 10,
) -> SolveResult:
    if g.n > cap:
        raise OracleCapExceeded(f"oracle is limited to {cap} vertices, graph has {g.n}")
    start, cpu0 = time.perf_counter(), time.process_time()
    w = w if w is not None else Weights.default(g, height)
    objective = Objective(objective)
    n, m, H = g.n, g.m, height

    def done(status, best=None, value=None, count=0):
        lay = Layering(H, best) if best is not None else None
        return SolveResult(
            status, value, lay, time.perf_counter() - start, time.process_time() - cpu0, count
        )

    if H < 1 or (m and H < 2):
        return done(Status.INFEASIBLE)
    if n == 0:
        return done(Status.OPTIMAL, (), exact(w.w_len * 0), 1)

    widths = [exact(x) for x in g.widths]
    dw = _lcm_den(widths)
    dwt = _lcm_den(w.as_tuple())
    int_w = np.array([int(x * dw) for x in widths], dtype=np.int64)
    coef_rev = int(w.w_rev * dwt) * dw
    coef_len = int(w.w_len * dwt) * dw
    coef_wid = int(w.w_wid * dwt)
    scale = dw * dwt
    worst = coef_rev * m + coef_len * m * H + coef_wid * (int(int_w.sum()) + m * dw)
    dtype = np.int64 if worst < 2**62 else object

    tails = np.array([u for u, _ in g.arcs], dtype=np.intp)
    heads = np.array([v for _, v in g.arcs], dtype=np.intp)
    with_dummies = objective is Objective.CGLP

    # vertices in the vectorised suffix, as many as fit one block
    n_suffix = min(n, max(1, int(math.log(_BLOCK) / math.log(H)))) if H > 1 else n
    n_prefix = n - n_suffix
    suffix_grid = np.array(
        np.unravel_index(np.arange(H**n_suffix), (H,) * n_suffix), dtype=np.int16
    ).T + 1
    adj_before: list[list[int]] = [[] for _ in range(n)]
    for u, v in g.arcs:
        adj_before[max(u, v)].append(min(u, v))

    best_value = None
    best_row = None
    count = 0
    rows = suffix_grid.shape[0]
    for prefix in _prefixes(n_prefix, H, adj_before):
        L = np.empty((rows, n), dtype=np.int16)
        if n_prefix:
            L[:, :n_prefix] = prefix
        L[:, n_prefix:] = suffix_grid
        if m:
            Lu, Lv = L[:, tails], L[:, heads]
            ok = np.all(Lu != Lv, axis=1)
            if not ok.any():
                continue
            L, Lu, Lv = L[ok], Lu[ok], Lv[ok]
        count += L.shape[0]
        loads = np.empty((L.shape[0], H), dtype=np.int64)
        for k in range(1, H + 1):
            loads[:, k - 1] = (L == k) @ int_w
        if m:
            rev = np.sum(Lu > Lv, axis=1, dtype=np.int64)
            diff = (Lv - Lu).astype(np.int64)
            if objective is Objective.MML_SIGNED:
                length = diff.sum(axis=1)
            else:
                length = np.abs(diff).sum(axis=1)
            if with_dummies:
                lo, hi = np.minimum(Lu, Lv), np.maximum(Lu, Lv)
                for k in range(2, H):
                    loads[:, k - 1] += dw * np.sum((lo < k) & (k < hi), axis=1)
        else:
            rev = length = np.zeros(L.shape[0], dtype=np.int64)
        width = loads.max(axis=1)
        cost = (
            rev.astype(dtype) * coef_rev
            + length.astype(dtype) * coef_len
            + width.astype(dtype) * coef_wid
        )
        i = int(np.argmin(cost))
        if best_value is None or cost[i] < best_value:
            best_value = cost[i]
            best_row = tuple(int(k) for k in L[i])
    if best_row is None:
        return done(Status.INFEASIBLE, count=count)
    return done(Status.OPTIMAL, best_row, exact(Fraction(int(best_value), scale)), count)
