"""Translate between layerings and variable assignments of a built model."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..layering import InvalidLayering, Layering, layer_loads, validate
from ..objective import exact
from .build import ModelKind, VarMap
from .model import BINARY, MilpModel

__all__ = ["CheckResult", "DecodeError", "check_assignment", "decode_solution", "encode_layering"]

DECODE_TOL = 1e-6


class DecodeError(ValueError):
    """A solver assignment that does not describe a valid layering."""


@dataclass(frozen=True)
class CheckResult:
    feasible: bool
    objective: Fraction | int
    violated: str | None = None

    def __bool__(self):
        return self.feasible


def encode_layering(vm: VarMap, lay: Layering) -> list[int | Fraction]:
    """Assignment that represents ``lay`` in the model described by ``vm``."""
    g = vm.graph
    if lay.height != vm.height:
        raise ValueError(f"layering height {lay.height} differs from model height {vm.height}")
    problems = validate(g, lay)
    if problems:
        raise InvalidLayering(problems)
    real, dummies = layer_loads(g, lay)
    real = [exact(r) for r in real]
    values: list[int | Fraction] = []
    for role in vm.roles:
        tag = role[0]
        if tag == "x":
            _, v, k = role
            values.append(int(lay[v] == k))
        elif tag == "y":
            _, v, k = role
            values.append(int(lay[v] < k))
        elif tag == "ya":
            _, v, k = role
            values.append(int(k < lay[v]))
        elif tag == "r":
            u, v = g.arcs[role[1]]
            values.append(int(lay[u] > lay[v]))
        elif tag == "z":
            _, a, k = role
            u, v = g.arcs[a]
            values.append(int(min(lay[u], lay[v]) < k < max(lay[u], lay[v])))
        elif tag == "W":
            values.append(max(r + d for r, d in zip(real, dummies)))
        elif tag == "Wr":
            values.append(max(real))
        elif tag == "l":
            u, v = g.arcs[role[1]]
            values.append(abs(lay[u] - lay[v]))
        else:
            raise ValueError(f"unknown variable role {role!r}")
    return values


def check_assignment(model: MilpModel, values, tol=0) -> CheckResult:
    """Evaluate bounds, integrality and every row exactly; report the first failure.

    Floats in ``values`` are converted to their exact rational value before
    evaluation, so ``tol=0`` is a true exactness check.
    """
    if len(values) != model.num_vars:
        raise ValueError(f"assignment has {len(values)} entries, model has {model.num_vars} variables")
    vals = [exact(x) for x in values]
    objective = model.objective_value(vals)
    for var, x in zip(model.variables, vals):
        if var.lower is not None and x < var.lower - tol:
            return CheckResult(False, objective, f"bound:{var.name}")
        if var.upper is not None and x > var.upper + tol:
            return CheckResult(False, objective, f"bound:{var.name}")
        if var.kind == BINARY and min(abs(x), abs(x - 1)) > tol:
            return CheckResult(False, objective, f"integrality:{var.name}")
    for row in model.constraints:
        if not row.satisfied(vals, tol):
            return CheckResult(False, objective, row.name)
    return CheckResult(True, objective, None)


def _binary(value, tol, name) -> int:
    x = float(value)
    b = round(x)
    if b not in (0, 1) or abs(x - b) > tol:
        raise DecodeError(f"{name} = {value} is not binary within {tol}")
    return int(b)


def decode_solution(vm: VarMap, values, tol: float = DECODE_TOL) -> Layering:
    """Recover the layering from an (integral) solution of the model."""
    H, g = vm.height, vm.graph
    layers = []
    if vm.kind == ModelKind.EXT:
        for v in range(g.n):
            bits = [_binary(values[vm.x[(v, k)]], tol, f"x_{v}_{k}") for k in range(1, H + 1)]
            if sum(bits) != 1:
                raise DecodeError(f"vertex {v} is assigned to {sum(bits)} layers")
            layers.append(bits.index(1) + 1)
    else:
        for v in range(g.n):
            count = sum(_binary(values[vm.y_below[(v, k)]], tol, f"y_{v}_{k}") for k in range(2, H + 1))
            layers.append(H - count)
    lay = Layering(H, tuple(layers))
    problems = validate(g, lay)
    if problems:
        raise DecodeError("decoded layering is invalid: " + "; ".join(problems[:3]))
    again = encode_layering(vm, lay)
    for j, role in enumerate(vm.roles):
        if role[0] in ("x", "y", "ya") and again[j] != _binary(values[j], tol, role[0]):
            raise DecodeError(f"variable {j} {role} is inconsistent with the decoded layering")
    return lay
