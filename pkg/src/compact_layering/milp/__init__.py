"""Linear model IR and the EXT / CGL / MML layering formulations."""

from ..objective import Objective, Weights
from .build import FormulationError, ModelKind, VarMap, build_cgl, build_ext, build_mml, build_model
from .codec import CheckResult, DecodeError, check_assignment, decode_solution, encode_layering
from .model import BINARY, CONTINUOUS, Constraint, LinExpr, MilpModel, Variable

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "CheckResult",
    "Constraint",
    "DecodeError",
    "FormulationError",
    "LinExpr",
    "MilpModel",
    "ModelKind",
    "Objective",
    "Variable",
    "VarMap",
    "Weights",
    "build_cgl",
    "build_ext",
    "build_mml",
    "build_model",
    "check_assignment",
    "decode_solution",
    "encode_layering",
]
