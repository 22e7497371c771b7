"""Exact depth-first branch and bound over layer assignments.

Vertices are fixed one at a time in descending-degree order.  A node is cut
when an unassigned vertex has no admissible layer left, or when

    cost of arcs with both ends fixed
  + sum over unassigned v of the cheapest admissible placement of v with
    respect to its fixed neighbours
  + cheapest possible cost of every arc with no end fixed
  + w_wid * max(current heaviest layer, ceil(total load / H))

reaches the incumbent.  Each term bounds a disjoint part of the objective, so
the sum is admissible.  After the optimum value is proven, a second pass in
vertex-id order retrieves the lexicographically smallest optimal layering so
results match the exhaustive oracle exactly.
"""

from __future__ import annotations

import time

from ..bounds import greedy_layering
from ..graph import DiGraph, degrees
from ..layering import Layering
from ..objective import Objective, Weights, evaluate, exact
from .result import SolveConfig, SolveResult, Status

__all__ = ["branch_and_bound"]

_CHECK_EVERY = 512


class _Timeout(Exception):
    pass


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, g: DiGraph, H: int, objective: Objective, w: Weights, deadline: float):
        self.g, self.H, self.objective, self.w = g, H, objective, w
        self.deadline = deadline
        self.nodes = 0
        self.with_dummies = objective is Objective.CGLP
        self.widths = [exact(x) for x in g.widths]
        self.total_width = sum(self.widths)
        self.integral_widths = all(isinstance(x, int) for x in self.widths)
        w_rev, w_len = w.w_rev, w.w_len
        signed = objective is Objective.MML_SIGNED
        # cost[a][b]: tail on layer a, head on layer b (1-based; diagonal unused)
        cost = [[0] * (H + 1) for _ in range(H + 1)]
        for a in range(1, H + 1):
            for b in range(1, H + 1):
                if a != b:
                    length = (b - a) if signed else abs(b - a)
                    cost[a][b] = (w_rev if a > b else 0) + w_len * length
        self.cost = cost
        self.min_arc = min((cost[a][b] for a in range(1, H + 1) for b in range(1, H + 1) if a != b), default=0)
        min_reversed = min((cost[a][b] for a in range(2, H + 1) for b in range(1, a)), default=0)
        # extra cost forced by each directed cycle whose arcs are all still free
        self.cycle_penalty = max(0, min_reversed - self.min_arc)
        self.succ: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
        for a, (u, v) in enumerate(g.arcs):
            self.succ[u].append((v, a))
        # incident arcs: (other endpoint, this vertex is the tail)
        self.incident: list[list[tuple[int, bool]]] = [[] for _ in range(g.n)]
        for u, v in g.arcs:
            self.incident[u].append((v, True))
            self.incident[v].append((u, False))

    def run(self, order: list[int], bound, stop_at_first: bool, incumbent=None, prefix=(), node_budget=None):
        """Search the vertices of ``order`` after placing the ``(vertex, layer)`` pairs of ``prefix``.

        Nodes whose lower bound is ``>= bound`` (``> bound`` when
        ``stop_at_first``) are cut.  Returns ``(value, layers, how)`` for the
        best leaf found, or for the first leaf with value ``<= bound`` when
        ``stop_at_first``; ``how`` is ``"complete"``, ``"budget"`` or
        ``"timeout"``.
        """
        g, H, w = self.g, self.H, self.w
        n = g.n
        cost, incident, widths = self.cost, self.incident, self.widths
        w_wid = w.w_wid
        with_dummies = self.with_dummies
        layer = [0] * n
        real = [0] * (H + 2)
        dum = [0] * (H + 2)
        # acc[v][k]: cost of v's arcs to fixed neighbours if v goes to layer k
        acc = [[0] * (H + 1) for _ in range(n)]
        block = [[0] * (H + 1) for _ in range(n)]
        state = {"partial": 0, "free_arcs": g.m, "dummies": 0}
        best = {"value": bound, "layers": incumbent}
        free_vertices = set(range(n))
        min_arc = self.min_arc
        total_width = self.total_width
        integral = self.integral_widths
        layers_range = range(1, H + 1)

        def width_lb():
            cur = max(real[k] + dum[k] for k in layers_range) if with_dummies else max(real[k] for k in layers_range)
            total = total_width + (state["dummies"] if with_dummies else 0)
            if integral:
                avg = -(-total // H)
            else:
                avg = total / H
            return cur if cur >= avg else avg

        succ = self.succ
        cycle_penalty = self.cycle_penalty

        def disjoint_cycles():
            """Greedy count of arc-disjoint directed cycles among free vertices."""
            used = set()
            count = 0
            while True:
                found = None
                done = set()
                for root in sorted(free_vertices):
                    if root in done:
                        continue
                    pos = {root: 0}
                    path_arcs: list[int] = []
                    stack = [(root, iter(succ[root]))]
                    while stack:
                        u, it = stack[-1]
                        for v, a in it:
                            if a in used or v not in free_vertices or v in done:
                                continue
                            if v in pos:
                                found = path_arcs[pos[v]:] + [a]
                                break
                            pos[v] = len(stack)
                            path_arcs.append(a)
                            stack.append((v, iter(succ[v])))
                            break
                        else:
                            stack.pop()
                            del pos[u]
                            done.add(u)
                            if path_arcs:
                                path_arcs.pop()
                            continue
                        if found is not None:
                            break
                    if found is not None:
                        break
                if found is None:
                    return count
                used.update(found)
                count += 1

        def lower_bound():
            lb = state["partial"] + state["free_arcs"] * min_arc
            for v in free_vertices:
                av, bv = acc[v], block[v]
                best_k = None
                for k in layers_range:
                    if not bv[k] and (best_k is None or av[k] < best_k):
                        best_k = av[k]
                if best_k is None:
                    return None
                lb += best_k
            lb += w_wid * width_lb()
            if cycle_penalty and len(free_vertices) > 1 and not cut(lb):
                lb += cycle_penalty * disjoint_cycles()
            return lb

        def place(v, k):
            layer[v] = k
            free_vertices.discard(v)
            real[k] += widths[v]
            for other, is_tail in incident[v]:
                ko = layer[other]
                if ko:
                    state["partial"] += cost[k][ko] if is_tail else cost[ko][k]
                    if with_dummies:
                        lo, hi = (k, ko) if k < ko else (ko, k)
                        for j in range(lo + 1, hi):
                            dum[j] += 1
                        state["dummies"] += hi - lo - 1
                else:
                    state["free_arcs"] -= 1
                    ao = acc[other]
                    if is_tail:
                        row = cost[k]
                        for j in layers_range:
                            ao[j] += row[j]
                    else:
                        for j in layers_range:
                            ao[j] += cost[j][k]
                    block[other][k] += 1

        def unplace(v, k):
            for other, is_tail in incident[v]:
                ko = layer[other]
                if ko:
                    state["partial"] -= cost[k][ko] if is_tail else cost[ko][k]
                    if with_dummies:
                        lo, hi = (k, ko) if k < ko else (ko, k)
                        for j in range(lo + 1, hi):
                            dum[j] -= 1
                        state["dummies"] -= hi - lo - 1
                else:
                    state["free_arcs"] += 1
                    ao = acc[other]
                    if is_tail:
                        row = cost[k]
                        for j in layers_range:
                            ao[j] -= row[j]
                    else:
                        for j in layers_range:
                            ao[j] -= cost[j][k]
                    block[other][k] -= 1
            real[k] -= widths[v]
            free_vertices.add(v)
            layer[v] = 0

        def cut(lb):
            if best["value"] is None:
                return False
            return lb > best["value"] if stop_at_first else lb >= best["value"]

        node_limit = None if node_budget is None else self.nodes + node_budget
        depth = len(order)

        def dfs(i):
            self.nodes += 1
            if self.nodes % _CHECK_EVERY == 0 and time.perf_counter() > self.deadline:
                raise _Timeout
            if node_limit is not None and self.nodes > node_limit:
                raise _Budget
            if i == depth:
                value = state["partial"] + w_wid * width_lb_exact()
                if best["value"] is None or value < best["value"] or (stop_at_first and value <= best["value"]):
                    best["value"] = value
                    best["layers"] = tuple(layer)
                    if stop_at_first:
                        return True
                return False
            v = order[i]
            av, bv = acc[v], block[v]
            if stop_at_first:
                candidates = [k for k in layers_range if not bv[k]]
            else:
                candidates = sorted((k for k in layers_range if not bv[k]), key=lambda k: (av[k], real[k], k))
            for k in candidates:
                place(v, k)
                lb = lower_bound()
                if lb is not None and not cut(lb):
                    if dfs(i + 1):
                        unplace(v, k)
                        return True
                unplace(v, k)
            return False

        def width_lb_exact():
            if with_dummies:
                return max(real[k] + dum[k] for k in layers_range)
            return max(real[k] for k in layers_range)

        for v, k in prefix:
            if block[v][k]:
                return None, None, "complete"
            place(v, k)
        if prefix:
            lb = lower_bound()
            if lb is None or cut(lb):
                return None, None, "complete"
        try:
            dfs(0)
        except _Budget:
            return best["value"], best["layers"], "budget"
        except _Timeout:
            return best["value"], best["layers"], "timeout"
        return best["value"], best["layers"], "complete"


def branch_and_bound(
    g: DiGraph,
    height: int,
    objective: Objective = Objective.CGLP,
    w: Weights | None = None,
    cfg: SolveConfig | None = None,
) -> SolveResult:
    cfg = cfg or SolveConfig()
    start, cpu0 = time.perf_counter(), time.process_time()
    w = w if w is not None else Weights.default(g, height)
    objective = Objective(objective)
    H = height

    def result(status, layers=None, value=None, nodes=0, message=""):
        lay = Layering(H, layers) if layers is not None else None
        return SolveResult(status, value, lay, time.perf_counter() - start, time.process_time() - cpu0, nodes, message)

    if H < 1 or (g.m and H < 2):
        return result(Status.INFEASIBLE, message="height too small to separate arc endpoints")
    if g.n == 0:
        return result(Status.OPTIMAL, (), 0)

    search = _Search(g, H, objective, w, start + cfg.time_limit)
    seed = greedy_layering(g, H)
    seed_value = evaluate(g, seed, objective, w) if seed is not None else None
    seed_layers = seed.layer_of if seed is not None else None

    deg, _ = degrees(g)
    order = sorted(range(g.n), key=lambda v: (-deg[v], v))
    value, layers, how = search.run(order, seed_value, stop_at_first=False, incumbent=seed_layers)
    if how == "timeout":
        if layers is None:
            return result(Status.TIME_LIMIT, nodes=search.nodes, message="time limit reached without a layering")
        return result(Status.TIME_LIMIT, layers, exact(value), search.nodes, "time limit reached")
    if layers is None:
        return result(Status.INFEASIBLE, nodes=search.nodes)
    layers = _lexicographic_optimum(search, order, value, layers, max(_MIN_TIE_BUDGET, search.nodes))
    return result(Status.OPTIMAL, layers, exact(value), search.nodes)


_MIN_TIE_BUDGET = 20000


def _lexicographic_optimum(search: _Search, order, value, layers, budget: int):
    """Smallest layer vector (vertex 0 most significant) among layerings of cost ``value``.

    Fixes vertices in id order, asking for each smaller layer whether the
    optimum is still reachable.  Stops early, keeping the best vector so far,
    once ``budget`` search nodes are spent; the budget is a node count, so
    the outcome never depends on timing.
    """
    best = list(layers)
    fixed: list[tuple[int, int]] = []
    for v in range(len(best)):
        rest = [u for u in order if u != v and all(u != f for f, _ in fixed)]
        for k in range(1, best[v]):
            if budget <= 0:
                return tuple(best)
            before = search.nodes
            got, found, how = search.run(
                rest, value, stop_at_first=True, prefix=fixed + [(v, k)], node_budget=budget
            )
            budget -= search.nodes - before
            if found is not None and got == value:
                best = list(found)
                break
            if how != "complete":
                return tuple(best)
        fixed.append((v, best[v]))
    return tuple(best)
