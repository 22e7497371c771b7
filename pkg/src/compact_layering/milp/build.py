"""Builders for the three layering formulations.

EXT
    assignment variables ``x_v_k`` (vertex v on layer k).
CGL
    ordering variables ``y_v_k`` meaning "l(v) < k" for k in 2..H; the
    complementary "k < l(v)" variables are substituted by ``1 - y_v_{k+1}``.
MML
    CGL without dummy variables; width counts real vertices only and arc
    length is either the signed layer difference (objective only) or an
    absolute value through ``l_u_v`` variables.

All builders share the reversal variables ``r_u_v`` and (EXT, CGL) the dummy
variables ``z_u_v_k`` for interior layers 2..H-1.  The model objective of EXT
and CGL carries the constant ``w_len * m`` so that it equals
``w_rev * rev + w_len * len + w_wid * W`` exactly (the z-sum counts
``len - m``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..graph import DiGraph
from ..objective import Objective, Weights
from .model import BINARY, CONTINUOUS, LinExpr, MilpModel

__all__ = ["ModelKind", "VarMap", "FormulationError", "build_cgl", "build_ext", "build_mml", "build_model"]


class FormulationError(ValueError):
    pass


class ModelKind:
    EXT = "ext"
    CGL = "cgl"
    MML = "mml"
    ALL = ("ext", "cgl", "mml")


def arc_tags(g: DiGraph) -> list[str]:
    """Variable-name suffix per arc; repeated parallel arcs get ``_p1``, ``_p2``..."""
    seen: dict[tuple[int, int], int] = {}
    tags = []
    for u, v in g.arcs:
        j = seen.get((u, v), 0)
        seen[(u, v)] = j + 1
        tags.append(f"{u}_{v}" if j == 0 else f"{u}_{v}_p{j}")
    return tags


@dataclass
class VarMap:
    """Where each formulation symbol lives in the model's variable list."""

    kind: str
    graph: DiGraph
    height: int
    weights: Weights
    signed: bool = False
    reduced: bool = True
    x: dict[tuple[int, int], int] = field(default_factory=dict)
    y_below: dict[tuple[int, int], int] = field(default_factory=dict)
    y_above: dict[tuple[int, int], int] = field(default_factory=dict)
    r: list[int] = field(default_factory=list)
    z: dict[tuple[int, int], int] = field(default_factory=dict)
    W: int | None = None
    Wr: int | None = None
    l: list[int] = field(default_factory=list)
    roles: list[tuple] = field(default_factory=list)

    @property
    def objective(self) -> Objective:
        if self.kind != ModelKind.MML:
            return Objective.CGLP
        return Objective.MML_SIGNED if self.signed else Objective.MML_ABS

    def to_dict(self, model: MilpModel) -> dict:
        names = [v.name for v in model.variables]
        return {
            "kind": self.kind,
            "H": self.height,
            "signed": self.signed,
            "reduced": self.reduced,
            "variables": [{"name": names[j], "role": list(role)} for j, role in enumerate(self.roles)],
        }

    def to_json(self, model: MilpModel) -> str:
        return json.dumps(self.to_dict(model), indent=1)


class _Builder:
    def __init__(self, kind, g, height, weights, anchor, signed=False, reduced=True):
        if g.m and height < 2:
            raise FormulationError(f"height {height} cannot separate arc endpoints; need H >= 2")
        if height < 1:
            raise FormulationError("height must be positive")
        self.g = g
        self.H = height
        self.w = weights if weights is not None else Weights.default(g, height)
        self.anchor = anchor
        self.model = MilpModel(name=f"{kind}_n{g.n}_m{g.m}_H{height}")
        self.vm = VarMap(kind, g, height, self.w, signed=signed, reduced=reduced)
        self.tags = arc_tags(g)
        self.widths = g.widths

    def var(self, name, kind, role, lower=0, upper=None) -> int:
        j = self.model.add_var(name, kind, lower, upper)
        self.vm.roles.append(role)
        return j

    def row(self, lhs: LinExpr, sense, rhs, name, group):
        if not lhs.terms:
            const_ok = {"<=": lhs.const <= rhs, ">=": lhs.const >= rhs, "=": lhs.const == rhs}[sense]
            if not const_ok:
                raise FormulationError(f"row {name} is constant and violated")
            return
        self.model.add_constraint(lhs, sense, rhs, name=name, group=group)

    # shared pieces

    def add_arc_vars(self, with_z: bool):
        H = self.H
        for a, tag in enumerate(self.tags):
            self.vm.r.append(self.var(f"r_{tag}", CONTINUOUS, ("r", a), 0, 1))
        if with_z:
            for a, tag in enumerate(self.tags):
                for k in range(2, H):
                    self.vm.z[(a, k)] = self.var(f"z_{tag}_{k}", CONTINUOUS, ("z", a, k), 0, 1)

    def width_rows(self, member, width_var: int, with_dummies: bool):
        H = self.H
        for k in range(1, H + 1):
            lhs = LinExpr()
            for v in range(self.g.n):
                lhs.add(member(v, k), self.widths[v])
            interior = 1 < k < H
            if with_dummies and interior:
                for a in range(self.g.m):
                    lhs.add(LinExpr.var(self.vm.z[(a, k)]))
            lhs.add(LinExpr.var(width_var), -1)
            group = "width_inner" if interior else "width_outer"
            self.row(lhs, "<=", 0, f"width_{k}", group)

    def anchor_row(self, member):
        if self.anchor:
            lhs = LinExpr()
            for v in range(self.g.n):
                lhs.add(member(v, 1))
            self.row(lhs, ">=", 1, "anchor", "anchor")

    def cglp_objective(self, width_var: int):
        w = self.w
        obj = LinExpr(const=w.w_len * self.g.m)
        for j in self.vm.r:
            obj.add(LinExpr.var(j, w.w_rev))
        for j in self.vm.z.values():
            obj.add(LinExpr.var(j, w.w_len))
        obj.add(LinExpr.var(width_var, w.w_wid))
        self.model.set_objective(obj)


def build_ext(g: DiGraph, height: int, w: Weights | None = None, anchor: bool = True) -> tuple[MilpModel, VarMap]:
    b = _Builder(ModelKind.EXT, g, height, w, anchor)
    vm, H = b.vm, height
    for v in range(g.n):
        for k in range(1, H + 1):
            vm.x[(v, k)] = b.var(f"x_{v}_{k}", BINARY, ("x", v, k))
    b.add_arc_vars(with_z=True)
    vm.W = b.var("W", CONTINUOUS, ("W",), 0, None)

    def x(v, k):
        return LinExpr.var(vm.x[(v, k)])

    def x_range(v, lo, hi):
        e = LinExpr()
        for k in range(max(lo, 1), min(hi, H) + 1):
            e.add(x(v, k))
        return e

    for v in range(g.n):
        b.row(x_range(v, 1, H), "=", 1, f"assign_{v}", "assign")
    for a, (u, v) in enumerate(g.arcs):
        for k in range(1, H + 1):
            b.row(x(u, k) + x(v, k), "<=", 1, f"noshare_{b.tags[a]}_{k}", "noshare")
    for a, (u, v) in enumerate(g.arcs):
        r = LinExpr.var(vm.r[a])
        for k in range(1, H + 1):
            b.row(x(u, k) - x_range(v, k, H) - r, "<=", 0, f"rev_{b.tags[a]}_{k}", "reverse")
    b.width_rows(lambda v, k: x(v, k), vm.W, with_dummies=True)
    for a, (u, v) in enumerate(g.arcs):
        for k in range(2, H):
            z = LinExpr.var(vm.z[(a, k)])
            b.row(x_range(v, 1, k - 1) - x_range(u, 1, k) - z, "<=", 0, f"dummy1_{b.tags[a]}_{k}", "dummy1")
    for a, (u, v) in enumerate(g.arcs):
        for k in range(2, H):
            z = LinExpr.var(vm.z[(a, k)])
            b.row(x_range(u, 1, k - 1) - x_range(v, 1, k) - z, "<=", 0, f"dummy2_{b.tags[a]}_{k}", "dummy2")
    b.anchor_row(lambda v, k: x(v, k))
    b.cglp_objective(vm.W)
    return b.model, vm


class _Ordering:
    """The y-variables of CGL/MML and the expressions derived from them."""

    def __init__(self, b: _Builder):
        self.b = b
        vm, H, n = b.vm, b.H, b.g.n
        if vm.reduced:
            for v in range(n):
                for k in range(2, H + 1):
                    vm.y_below[(v, k)] = b.var(f"y_{v}_{k}", BINARY, ("y", v, k))
        else:
            for v in range(n):
                for k in range(1, H + 1):
                    vm.y_below[(v, k)] = b.var(f"y_{v}_{k}", BINARY, ("y", v, k))
            for v in range(n):
                for k in range(1, H + 1):
                    vm.y_above[(v, k)] = b.var(f"ya_{k}_{v}", BINARY, ("ya", v, k))

    def below(self, v: int, k: int) -> LinExpr:
        """[l(v) < k]"""
        vm, H = self.b.vm, self.b.H
        if vm.reduced:
            if k <= 1:
                return LinExpr()
            if k > H:
                return LinExpr(const=1)
        return LinExpr.var(vm.y_below[(v, k)])

    def above(self, v: int, k: int) -> LinExpr:
        """[k < l(v)]"""
        if self.b.vm.reduced:
            return 1 - self.below(v, k + 1)
        return LinExpr.var(self.b.vm.y_above[(v, k)])

    def member(self, v: int, k: int) -> LinExpr:
        """[l(v) = k]"""
        return 1 - self.below(v, k) - self.above(v, k)

    def structural_rows(self):
        b, H = self.b, self.b.H
        n = b.g.n
        if not b.vm.reduced:
            for v in range(n):
                b.row(self.below(v, 1), "=", 0, f"nobelow_{v}", "fix_below")
            for v in range(n):
                b.row(self.above(v, H), "=", 0, f"noabove_{v}", "fix_above")
            for v in range(n):
                for k in range(1, H):
                    b.row(self.above(v, k) + self.below(v, k + 1), "=", 1, f"xor_{v}_{k}", "xor")
        for v in range(n):
            for k in range(1, H - 1):
                b.row(self.above(v, k + 1) - self.above(v, k), "<=", 0, f"trans_{v}_{k}", "transitivity")
        for a, (u, v) in enumerate(b.g.arcs):
            r = LinExpr.var(b.vm.r[a])
            for k in range(1, H + 1):
                b.row(-self.below(u, k) - self.above(v, k) - r, "<=", -1, f"fwd_{b.tags[a]}_{k}", "order_fwd")
        for a, (u, v) in enumerate(b.g.arcs):
            r = LinExpr.var(b.vm.r[a])
            for k in range(1, H + 1):
                b.row(-self.above(u, k) - self.below(v, k) + r, "<=", 0, f"bwd_{b.tags[a]}_{k}", "order_bwd")

    def level(self, v: int) -> LinExpr:
        """sum_k [k < l(v)] = l(v) - 1"""
        e = LinExpr()
        for k in range(1, self.b.H + 1):
            e.add(self.above(v, k))
        return e


def build_cgl(
    g: DiGraph, height: int, w: Weights | None = None, anchor: bool = True, reduced: bool = True
) -> tuple[MilpModel, VarMap]:
    """CGL model; ``reduced=False`` keeps both y families and the coupling rows (debug only)."""
    b = _Builder(ModelKind.CGL, g, height, w, anchor, reduced=reduced)
    y = _Ordering(b)
    vm, H = b.vm, height
    b.add_arc_vars(with_z=True)
    vm.W = b.var("W", CONTINUOUS, ("W",), 0, None)
    y.structural_rows()
    for a, (u, v) in enumerate(g.arcs):
        for k in range(2, H):
            z = LinExpr.var(vm.z[(a, k)])
            b.row(y.above(u, k) + y.below(v, k) - z, "<=", 1, f"dummy1_{b.tags[a]}_{k}", "dummy1")
    for a, (u, v) in enumerate(g.arcs):
        for k in range(2, H):
            z = LinExpr.var(vm.z[(a, k)])
            b.row(y.above(v, k) + y.below(u, k) - z, "<=", 1, f"dummy2_{b.tags[a]}_{k}", "dummy2")
    b.width_rows(y.member, vm.W, with_dummies=True)
    b.anchor_row(y.member)
    b.cglp_objective(vm.W)
    return b.model, vm


def build_mml(
    g: DiGraph, height: int, w: Weights | None = None, anchor: bool = True, signed: bool = True
) -> tuple[MilpModel, VarMap]:
    b = _Builder(ModelKind.MML, g, height, w, anchor, signed=signed)
    y = _Ordering(b)
    vm, w = b.vm, b.w
    b.add_arc_vars(with_z=False)
    vm.Wr = b.var("Wr", CONTINUOUS, ("Wr",), 0, None)
    if not signed:
        for a, tag in enumerate(b.tags):
            vm.l.append(b.var(f"l_{tag}", CONTINUOUS, ("l", a), None, None))
    y.structural_rows()
    b.width_rows(y.member, vm.Wr, with_dummies=False)
    obj = LinExpr()
    for j in vm.r:
        obj.add(LinExpr.var(j, w.w_rev))
    if signed:
        for u, v in g.arcs:
            obj.add(y.level(v) - y.level(u), w.w_len)
    else:
        for a, (u, v) in enumerate(g.arcs):
            la = LinExpr.var(vm.l[a])
            b.row(y.level(v) - y.level(u) - la, "<=", 0, f"len1_{b.tags[a]}", "length1")
        for a, (u, v) in enumerate(g.arcs):
            la = LinExpr.var(vm.l[a])
            b.row(y.level(u) - y.level(v) - la, "<=", 0, f"len2_{b.tags[a]}", "length2")
        for j in vm.l:
            obj.add(LinExpr.var(j, w.w_len))
    obj.add(LinExpr.var(vm.Wr, w.w_wid))
    b.anchor_row(y.member)
    b.model.set_objective(obj)
    return b.model, vm


def build_model(
    kind: str, g: DiGraph, height: int, w: Weights | None = None, anchor: bool = True, signed: bool = True
) -> tuple[MilpModel, VarMap]:
    kind = kind.lower()
    if kind == ModelKind.EXT:
        return build_ext(g, height, w, anchor)
    if kind == ModelKind.CGL:
        return build_cgl(g, height, w, anchor)
    if kind == ModelKind.MML:
        return build_mml(g, height, w, anchor, signed=signed)
    raise ValueError(f"unknown model kind {kind!r}")
