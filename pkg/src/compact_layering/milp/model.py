"""Solver-agnostic linear model: variables, rows and a minimisation objective.

Coefficients are exact (``int`` or ``Fraction``) so feasibility and objective
checks never depend on floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from ..objective import exact

__all__ = ["Constraint", "MilpModel", "Variable", "BINARY", "CONTINUOUS", "SENSES"]

BINARY = "binary"
CONTINUOUS = "continuous"
SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = CONTINUOUS
    lower: int | Fraction | None = 0
    upper: int | Fraction | None = None


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[int, int | Fraction], ...]
    sense: str
    rhs: int | Fraction
    group: str = ""

    def activity(self, values) -> Fraction:
        return sum((c * values[j] for j, c in self.coeffs), Fraction(0))

    def satisfied(self, values, tol=0) -> bool:
        lhs = self.activity(values)
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


class LinExpr:
    """Sparse affine expression used while building rows."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Mapping[int, object] | None = None, const=0):
        self.terms: dict[int, object] = dict(terms or {})
        self.const = const

    @classmethod
    def var(cls, j: int, coef=1) -> "LinExpr":
        return cls({j: coef})

    def add(self, other: "LinExpr | int | Fraction", scale=1) -> "LinExpr":
        if isinstance(other, LinExpr):
            for j, c in other.terms.items():
                self.terms[j] = self.terms.get(j, 0) + scale * c
            self.const += scale * other.const
        else:
            self.const += scale * other
        return self

    def __add__(self, other):
        return LinExpr(self.terms, self.const).add(other)

    def __sub__(self, other):
        return LinExpr(self.terms, self.const).add(other, -1)

    def __neg__(self):
        return LinExpr({j: -c for j, c in self.terms.items()}, -self.const)

    def __mul__(self, k):
        return LinExpr({j: k * c for j, c in self.terms.items()}, k * self.const)

    __rmul__ = __mul__

    def __radd__(self, other):
        return self.__add__(other)

    def __rsub__(self, other):
        return (-self).add(other)


@dataclass
class MilpModel:
    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[int, int | Fraction] = field(default_factory=dict)
    objective_constant: int | Fraction = 0
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def add_var(self, name: str, kind: str = CONTINUOUS, lower=0, upper=None) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable {name}")
        if kind == BINARY:
            lower, upper = 0, 1
        elif kind != CONTINUOUS:
            raise ValueError(f"unknown variable kind {kind!r}")
        lower = None if lower is None else exact(lower)
        upper = None if upper is None else exact(upper)
        self._index[name] = len(self.variables)
        self.variables.append(Variable(name, kind, lower, upper))
        return len(self.variables) - 1

    def index(self, name: str) -> int:
        return self._index[name]

    def add_constraint(self, lhs: LinExpr, sense: str, rhs=0, name: str | None = None, group: str = "") -> int:
        """Add ``lhs sense rhs``; the constant part of ``lhs`` moves to the right."""
        if sense not in SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        coeffs = tuple((j, exact(c)) for j, c in sorted(lhs.terms.items()) if c != 0)
        for j, _ in coeffs:
            if not 0 <= j < len(self.variables):
                raise ValueError(f"row references undeclared variable {j}")
        if name is None:
            name = f"c{len(self.constraints) + 1}"
        self.constraints.append(Constraint(name, coeffs, sense, exact(rhs - lhs.const), group))
        return len(self.constraints) - 1

    def set_objective(self, expr: LinExpr) -> None:
        self.objective = {j: exact(c) for j, c in sorted(expr.terms.items()) if c != 0}
        self.objective_constant = exact(expr.const)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def group_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for row in self.constraints:
            counts[row.group] = counts.get(row.group, 0) + 1
        return counts

    def objective_value(self, values) -> int | Fraction:
        return exact(self.objective_constant + sum((c * values[j] for j, c in self.objective.items()), Fraction(0)))

    def canonical(self) -> tuple:
        """Name-based normal form; two models are the same iff these are equal."""
        names = [v.name for v in self.variables]
        variables = sorted((v.name, v.kind, v.lower, v.upper) for v in self.variables)
        rows = sorted(
            (r.name, tuple(sorted((names[j], c) for j, c in r.coeffs)), r.sense, r.rhs) for r in self.constraints
        )
        obj = tuple(sorted((names[j], c) for j, c in self.objective.items()))
        return variables, rows, obj, self.objective_constant

    def same_as(self, other: "MilpModel") -> bool:
        return self.canonical() == other.canonical()


def expr_sum(exprs: Iterable[LinExpr | int]) -> LinExpr:
    total = LinExpr()
    for e in exprs:
        total.add(e)
    return total
