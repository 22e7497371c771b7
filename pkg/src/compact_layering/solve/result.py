from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from fractions import Fraction

from ..layering import Layering

__all__ = ["SOLVER_ENV", "SolveConfig", "SolveResult", "Status"]

#: environment variable holding the default external solver command template
SOLVER_ENV = "COMPACT_LAYERING_SOLVER"


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    TIME_LIMIT = "TimeLimit"
    BRIDGE_ERROR = "BridgeError"

    def __str__(self):
        return self.value


@dataclass
class SolveConfig:
    time_limit: float = 600.0
    engine: str = "bnb"
    solver_cmd: str | None = None
    workdir: str | None = None
    oracle_cap: int = 10
    bnb_cap: int = 25
    exact: bool = True
    # extra seconds the bridge waits past the time limit before killing the solver
    external_grace: float = 5.0

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time limit must be positive")
        if self.engine not in ("oracle", "bnb", "external"):
            raise ValueError(f"unknown engine {self.engine!r}")

    def command_template(self) -> str | None:
        return self.solver_cmd or os.environ.get(SOLVER_ENV) or None


@dataclass
class SolveResult:
    status: Status
    objective: int | Fraction | None = None
    layering: Layering | None = None
    wall_time: float = 0.0
    cpu_time: float = 0.0
    nodes: int = 0
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def has_layering(self) -> bool:
        return self.layering is not None

    def objective_json(self):
        if isinstance(self.objective, Fraction):
            return float(self.objective)
        return self.objective
