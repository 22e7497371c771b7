"""Solve paths: exhaustive oracle, branch and bound, and an external MIP bridge."""

from __future__ import annotations

from ..graph import DiGraph
from ..milp.build import ModelKind, build_model
from ..objective import Objective, Weights
from .bnb import branch_and_bound
from .bridge import BridgeError, invoke_external, parse_solution
from .lpfile import LpFormatError, read_lp, write_lp
from .oracle import OracleCapExceeded, brute_force
from .result import SOLVER_ENV, SolveConfig, SolveResult, Status

__all__ = [
    "BridgeError",
    "LpFormatError",
    "OracleCapExceeded",
    "SOLVER_ENV",
    "SolveConfig",
    "SolveResult",
    "Status",
    "branch_and_bound",
    "brute_force",
    "invoke_external",
    "model_objective",
    "parse_solution",
    "read_lp",
    "solve",
    "write_lp",
]


def model_objective(kind: str, signed: bool = True) -> Objective:
    """Objective minimised by a model of the given kind."""
    if kind.lower() == ModelKind.MML:
        return Objective.MML_SIGNED if signed else Objective.MML_ABS
    return Objective.CGLP


def solve(
    g: DiGraph,
    height: int,
    kind: str = ModelKind.CGL,
    w: Weights | None = None,
    cfg: SolveConfig | None = None,
    signed: bool = True,
    anchor: bool = True,
) -> SolveResult:
    """Solve the layering problem that ``kind`` formulates, with ``cfg.engine``.

    The internal engines work on the combinatorial problem directly, so for
    them ``kind`` only selects the objective; EXT and CGL share one optimum.
    """
    cfg = cfg or SolveConfig()
    w = w if w is not None else Weights.default(g, height)
    objective = model_objective(kind, signed)
    if cfg.engine == "oracle":
        return brute_force(g, height, objective, w, cap=cfg.oracle_cap)
    if cfg.engine == "bnb":
        return branch_and_bound(g, height, objective, w, cfg)
    if height < 1 or (g.m and height < 2):
        return SolveResult(Status.INFEASIBLE, message="height too small to separate arc endpoints")
    model, vm = build_model(kind, g, height, w, anchor=anchor, signed=signed)
    return invoke_external(model, vm, cfg)
