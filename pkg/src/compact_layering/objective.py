"""Objective weights and exact evaluation of the three layering objectives.

* ``CGLP``: ``w_rev * rev + w_len * len + w_wid * W`` (W counts dummy vertices)
* ``MML_SIGNED``: ``w_rev * rev + w_len * sum(l(v) - l(u)) + w_wid * W_r``
* ``MML_ABS``: ``w_rev * rev + w_len * len + w_wid * W_r``
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .graph import DiGraph
from .layering import InvalidLayering, Layering, layer_loads, validate

__all__ = ["Objective", "Weights", "evaluate", "exact"]


def exact(x) -> int | Fraction:
    """Exact rational copy of a number; integers stay ``int``."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Rational):
        f = Fraction(x)
    else:
        xf = float(x)
        if not math.isfinite(xf):
            raise ValueError(f"non-finite value {x!r}")
        f = Fraction(xf)
    return f.numerator if f.denominator == 1 else f


class Objective(str, enum.Enum):
    CGLP = "cglp"
    MML_SIGNED = "mml-signed"
    MML_ABS = "mml-abs"


@dataclass(frozen=True)
class Weights:
    w_rev: int | Fraction
    w_len: int | Fraction = 1
    w_wid: int | Fraction = 1

    def __post_init__(self):
        for name in ("w_rev", "w_len", "w_wid"):
            value = exact(getattr(self, name))
            if value < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, value)

    @classmethod
    def default(cls, g: DiGraph, height: int) -> "Weights":
        return cls(g.m * height, 1, 1)

    def as_tuple(self):
        return self.w_rev, self.w_len, self.w_wid

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in zip(("w_rev", "w_len", "w_wid"), self.as_tuple())}


def _jsonable(x):
    if isinstance(x, Fraction):
        return float(x)
    return x


def evaluate(g: DiGraph, lay: Layering, objective: Objective, w: Weights) -> int | Fraction:
    """Exact objective value of a valid layering."""
    objective = Objective(objective)
    problems = validate(g, lay)
    if problems:
        raise InvalidLayering(problems)
    real, dummies = layer_loads(g, lay)
    real = [exact(r) for r in real]
    rev = sum(1 for u, v in g.arcs if lay[u] > lay[v])
    if objective is Objective.CGLP:
        length = sum(abs(lay[u] - lay[v]) for u, v in g.arcs)
        width = max(r + d for r, d in zip(real, dummies))
    elif objective is Objective.MML_SIGNED:
        length = sum(lay[v] - lay[u] for u, v in g.arcs)
        width = max(real)
    elif objective is Objective.MML_ABS:
        length = sum(abs(lay[u] - lay[v]) for u, v in g.arcs)
        width = max(real)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    value = w.w_rev * rev + w.w_len * length + w.w_wid * width
    return exact(value)
