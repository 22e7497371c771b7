"""Run an external MIP solver on an LP file and read its assignment back.

The command template is split with shlex and may use the placeholders
``{lp}``, ``{sol}`` and ``{timelimit}``.  The solver must write a solution
file of ``name value`` lines; ``#`` or ``*`` start a comment, an
``objective <v>`` line is accepted and ignored, and an optional
``status <word>`` line reports optimal, feasible, infeasible or timelimit.
Variables missing from the file are read as 0.

The objective reported back is always recomputed from the decoded layering.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
import time
from fractions import Fraction

from ..milp.build import VarMap
from ..milp.codec import DecodeError, decode_solution
from ..milp.model import MilpModel
from ..objective import evaluate, exact
from .lpfile import write_lp
from .result import SolveConfig, SolveResult, Status

__all__ = ["BridgeError", "invoke_external", "parse_solution"]

_STATUS_WORDS = {
    "optimal": Status.OPTIMAL,
    "feasible": Status.FEASIBLE,
    "infeasible": Status.INFEASIBLE,
    "timelimit": Status.TIME_LIMIT,
    "time_limit": Status.TIME_LIMIT,
}


class BridgeError(RuntimeError):
    pass


def _value(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        try:
            return Fraction(float(text))
        except (ValueError, OverflowError) as exc:
            raise BridgeError(f"bad number {text!r}") from exc


def parse_solution(text: str, names: list[str]) -> tuple[Status | None, list]:
    """Values in model order plus the status the solver declared, if any."""
    slot = {name: j for j, name in enumerate(names)}
    values: list = [0] * len(names)
    status = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#*":
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BridgeError(f"solution line {lineno}: expected 'name value', got {line!r}")
        name, token = parts
        key = name.lower()
        if key == "objective":
            _value(token)
            continue
        if key == "status":
            if token.lower() not in _STATUS_WORDS:
                raise BridgeError(f"solution line {lineno}: unknown status {token!r}")
            status = _STATUS_WORDS[token.lower()]
            continue
        if name not in slot:
            raise BridgeError(f"solution line {lineno}: unknown variable {name!r}")
        values[slot[name]] = _value(token)
    return status, values


def invoke_external(model: MilpModel, vm: VarMap, cfg: SolveConfig) -> SolveResult:
    start, cpu0 = time.perf_counter(), time.process_time()
    template = cfg.command_template()

    def result(status, lay=None, value=None, message="", extra=None):
        return SolveResult(
            status, value, lay, time.perf_counter() - start, time.process_time() - cpu0, 0, message, extra or {}
        )

    if not template:
        return result(Status.BRIDGE_ERROR, message="no external solver command configured")

    workdir = tempfile.mkdtemp(prefix="layering-", dir=cfg.workdir)
    lp_path = os.path.join(workdir, "model.lp")
    sol_path = os.path.join(workdir, "model.sol")
    try:
        with open(lp_path, "w", encoding="utf-8") as fh:
            fh.write(write_lp(model))
        limit = f"{cfg.time_limit:g}"
        argv = [part.format(lp=lp_path, sol=sol_path, timelimit=limit) for part in shlex.split(template)]
        try:
            proc = subprocess.run(
                argv,
                capture_output=True,
                text=True,
                timeout=cfg.time_limit + cfg.external_grace,
            )
        except subprocess.TimeoutExpired:
            return result(Status.TIME_LIMIT, message="external solver killed after the time limit")
        except OSError as exc:
            return result(Status.BRIDGE_ERROR, message=f"cannot start solver: {exc}")
        output = (proc.stdout + proc.stderr)[-4000:]
        if proc.returncode != 0:
            return result(Status.BRIDGE_ERROR, message=f"solver exited with {proc.returncode}", extra={"output": output})
        if not os.path.exists(sol_path):
            return result(Status.BRIDGE_ERROR, message="solver wrote no solution file", extra={"output": output})
        with open(sol_path, encoding="utf-8") as fh:
            text = fh.read()
        names = [v.name for v in model.variables]
        try:
            status, values = parse_solution(text, names)
        except BridgeError as exc:
            return result(Status.BRIDGE_ERROR, message=str(exc), extra={"output": output})
        if status is Status.INFEASIBLE:
            return result(Status.INFEASIBLE, message="solver reports infeasible")
        if status is Status.TIME_LIMIT and not any(values):
            return result(Status.TIME_LIMIT, message="solver stopped without a solution")
        try:
            lay = decode_solution(vm, values)
        except (DecodeError, ValueError) as exc:
            return result(Status.BRIDGE_ERROR, message=f"cannot decode solution: {exc}", extra={"output": output})
        value = exact(evaluate(vm.graph, lay, vm.objective, vm.weights))
        return result(status or Status.OPTIMAL, lay, value)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)
