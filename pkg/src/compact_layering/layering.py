"""Layerings, their validation and the width / length / reversal metrics."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Sequence

from .graph import DiGraph

__all__ = [
    "InvalidLayering",
    "Layering",
    "LayeringMetrics",
    "layer_loads",
    "layer_width",
    "metrics",
    "validate",
]


class InvalidLayering(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        head = "; ".join(self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"invalid layering: {head}{more}")


@dataclass(frozen=True)
class Layering:
    """Layer per vertex, 1-based, within a height bound ``height``."""

    height: int
    layer_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "layer_of", tuple(int(k) for k in self.layer_of))
        if self.height < 1:
            raise ValueError("height must be positive")

    def __len__(self):
        return len(self.layer_of)

    def __getitem__(self, v: int) -> int:
        return self.layer_of[v]

    def shifted(self, c: int) -> "Layering":
        return Layering(self.height, tuple(k + c for k in self.layer_of))

    def to_dict(self) -> dict:
        return {"H": self.height, "layers": list(self.layer_of)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Layering":
        return cls(int(data["H"]), tuple(int(k) for k in data["layers"]))

    @classmethod
    def from_json(cls, text: str) -> "Layering":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class LayeringMetrics:
    height: int
    height_used: int
    width: float
    real_width: float
    total_length: int
    reversed: int
    dummy_count: int
    est_aspect_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def validate(g: DiGraph, lay: Layering) -> list[str]:
    """Return every violation of ``lay`` on ``g``; an empty list means valid."""
    if len(lay) != g.n:
        raise ValueError(f"layering covers {len(lay)} vertices, graph has {g.n}")
    problems = []
    for v, k in enumerate(lay.layer_of):
        if not 1 <= k <= lay.height:
            problems.append(f"vertex {v} on layer {k} outside [1, {lay.height}]")
    for i, (u, v) in enumerate(g.arcs):
        if lay[u] == lay[v]:
            problems.append(f"arc {i} ({u}, {v}) has both ends on layer {lay[u]}")
    return problems


def _require_valid(g: DiGraph, lay: Layering) -> None:
    problems = validate(g, lay)
    if problems:
        raise InvalidLayering(problems)


def layer_loads(g: DiGraph, lay: Layering) -> tuple[list, list[int]]:
    """Real-vertex width and dummy count for every layer, index 0 = layer 1."""
    H = lay.height
    real = [0] * H
    for v, w in enumerate(g.widths):
        real[lay[v] - 1] += w
    # difference array over the open interval (lo, hi)
    diff = [0] * (H + 1)
    for u, v in g.arcs:
        lo, hi = sorted((lay[u], lay[v]))
        if hi - lo > 1:
            diff[lo] += 1
            diff[hi - 1] -= 1
    dummies = []
    running = 0
    for k in range(H):
        running += diff[k]
        dummies.append(running)
    return real, dummies


def layer_width(g: DiGraph, lay: Layering, k: int) -> tuple[float, int]:
    if not 1 <= k <= lay.height:
        raise ValueError(f"layer {k} outside [1, {lay.height}]")
    _require_valid(g, lay)
    real, dummies = layer_loads(g, lay)
    return real[k - 1], dummies[k - 1]


def metrics(g: DiGraph, lay: Layering) -> LayeringMetrics:
    _require_valid(g, lay)
    real, dummies = layer_loads(g, lay)
    total_length = sum(abs(lay[u] - lay[v]) for u, v in g.arcs)
    rev = sum(1 for u, v in g.arcs if lay[u] > lay[v])
    width = max(r + d for r, d in zip(real, dummies))
    return LayeringMetrics(
        height=lay.height,
        height_used=max(lay.layer_of, default=0),
        width=width,
        real_width=max(real),
        total_length=total_length,
        reversed=rev,
        dummy_count=total_length - g.m,
        est_aspect_ratio=width / lay.height,
    )
