"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 infeasible, 3 time limit,
4 external solver failure, 5 disagreement found by ``verify``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .bench import format_summary, generate_suite, rows_to_csv, run_bench, summarize, summary_to_csv
from .bounds import default_height, degree_bound, height_bounds
from .graph import GraphFormatError, RandomGraphSpec, generate_random, read_graph, write_edge_list
from .layering import InvalidLayering, Layering, metrics
from .milp import ModelKind, build_model, check_assignment, encode_layering
from .objective import Objective, Weights
from .render import RenderOptions, render_svg
from .solve import SolveConfig, Status, brute_force, model_objective, solve
from .solve.bnb import branch_and_bound

SCHEMA = 1
BNB_ADVISORY_CAP = 25

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_TIME_LIMIT, EXIT_BRIDGE, EXIT_DISAGREE = range(6)
_STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.FEASIBLE: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.TIME_LIMIT: EXIT_TIME_LIMIT,
    Status.BRIDGE_ERROR: EXIT_BRIDGE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def _emit(args, text: str) -> None:
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_graph(path):
    try:
        return read_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except GraphFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _config(args, n: int | None = None) -> SolveConfig:
    engine = args.engine
    if engine is None:
        engine = "external" if SolveConfig(solver_cmd=args.solver_cmd).command_template() else "bnb"
    if engine == "bnb" and n is not None and n > BNB_ADVISORY_CAP:
        print(
            f"warning: {n} vertices is beyond the comfortable range of the internal solver; "
            "consider --solver-cmd",
            file=sys.stderr,
        )
    return SolveConfig(time_limit=args.time_limit, engine=engine, solver_cmd=args.solver_cmd)


# subcommands


def cmd_layer(args) -> int:
    g = _load_graph(args.file)
    H = args.height or default_height(g.n)
    cfg = _config(args, g.n)
    kind = args.model

    def attempt(H):
        w = Weights.default(g, H)
        w = Weights(
            args.w_rev if args.w_rev is not None else w.w_rev,
            args.w_len if args.w_len is not None else w.w_len,
            args.w_wid if args.w_wid is not None else w.w_wid,
        )
        return w, solve(g, H, kind, w, cfg, signed=not args.abs)

    w, res = attempt(H)
    raised_from = None
    if res.status is Status.INFEASIBLE and args.auto_raise:
        safe = degree_bound(g)
        if safe > H:
            raised_from, H = H, safe
            print(f"infeasible at H={raised_from}, retrying with H={H}", file=sys.stderr)
            w, res = attempt(H)
    out = {
        "schema": SCHEMA,
        "instance": args.file,
        "n": g.n,
        "m": g.m,
        "H": H,
        "model": kind,
        "objective_kind": model_objective(kind, not args.abs).value,
        "engine": cfg.engine,
        "weights": w.to_dict(),
        "status": str(res.status),
        "objective": _jsonable(res.objective),
        "layering": res.layering.to_dict() if res.layering is not None else None,
        "metrics": metrics(g, res.layering).to_dict() if res.layering is not None else None,
        "wall_time": round(res.wall_time, 6),
        "cpu_time": round(res.cpu_time, 6),
        "nodes": res.nodes,
    }
    if raised_from is not None:
        out["raised_from"] = raised_from
    if res.message:
        out["message"] = res.message
        if res.status is not Status.OPTIMAL:
            print(res.message, file=sys.stderr)
    _emit(args, _dump(out))
    return _STATUS_EXIT[res.status]


def cmd_gen(args) -> int:
    if args.suite:
        paths = generate_suite(args.suite, args.count, args.n_min, args.n_max, args.density, args.seed)
        print(f"wrote {len(paths)} instances to {args.suite}", file=sys.stderr)
        return EXIT_OK
    if args.n is None:
        raise UsageError("gen needs --n or --suite")
    try:
        spec = RandomGraphSpec(args.n, args.density, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, write_edge_list(generate_random(spec)))
    return EXIT_OK


def cmd_bench(args) -> int:
    models = [m.strip().upper() for m in args.models.split(",") if m.strip()]
    cfg = _config(args)
    try:
        rows = run_bench(args.directory, models, cfg, args.height, args.jobs)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, rows_to_csv(rows, with_time=not args.no_timing))
    if args.summary:
        summary = summarize(rows) if rows else []
        text = summary_to_csv(summary) if args.summary_format == "csv" else format_summary(summary)
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(text)
    failed = sum(r.status == "Error" for r in rows)
    if failed:
        print(f"{failed} of {len(rows)} runs failed", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = _load_graph(args.file)
    out = {"schema": SCHEMA, "instance": args.file, "n": g.n, "m": g.m}
    out.update(height_bounds(g).to_dict())
    _emit(args, _dump(out))
    return EXIT_OK


def cmd_render(args) -> int:
    g = _load_graph(args.file)
    try:
        with open(args.layering, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read layering {args.layering}: {exc}") from exc
    if isinstance(data, dict) and "layering" in data and isinstance(data["layering"], dict):
        data = data["layering"]
    try:
        lay = Layering.from_dict(data)
        svg = render_svg(g, lay, RenderOptions(sweeps=args.sweeps, show_dummies=not args.no_dummies))
    except (InvalidLayering, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad layering: {exc}") from exc
    _emit(args, svg)
    return EXIT_OK


def verify_instance(g, H: int, time_limit: float = 600.0, oracle_cap: int = 10) -> dict:
    """Oracle, branch and bound and model encodings on one instance.

    Each objective gets ``agree`` true, false, or None when a solver stopped
    at the time limit; the top-level ``agree`` is false if any objective
    disagrees, else None if any was inconclusive.
    """
    cfg = SolveConfig(time_limit=time_limit)
    report = {"n": g.n, "m": g.m, "H": H, "objectives": {}, "agree": True}
    for objective in Objective:
        w = Weights.default(g, H)
        entry = {}
        b = branch_and_bound(g, H, objective, w, cfg)
        entry["bnb"] = {"status": str(b.status), "objective": _jsonable(b.objective)}
        ok = True
        if g.n <= oracle_cap:
            o = brute_force(g, H, objective, w, cap=oracle_cap)
            entry["oracle"] = {"status": str(o.status), "objective": _jsonable(o.objective)}
            ok = ok and o.status == b.status and o.objective == b.objective
        else:
            entry["oracle"] = "skipped"
        if b.layering is not None:
            kinds = [ModelKind.EXT, ModelKind.CGL] if objective is Objective.CGLP else [ModelKind.MML]
            for kind in kinds:
                signed = objective is not Objective.MML_ABS
                model, vm = build_model(kind, g, H, w, signed=signed)
                lay = b.layering
                # the anchor wants layer 1 occupied; shifting keeps the objective
                lay = lay.shifted(1 - min(lay.layer_of))
                check = check_assignment(model, encode_layering(vm, lay))
                entry[kind] = {"feasible": check.feasible, "objective": _jsonable(check.objective)}
                if check.violated:
                    entry[kind]["violated"] = check.violated
                ok = ok and check.feasible and check.objective == b.objective
        if ok and b.status is Status.TIME_LIMIT:
            ok = None
        entry["agree"] = ok
        report["objectives"][objective.value] = entry
        if ok is False or report["agree"] is False:
            report["agree"] = False
        elif ok is None:
            report["agree"] = None
    return report


def cmd_verify(args) -> int:
    g = _load_graph(args.file)
    H = args.height or degree_bound(g)
    report = verify_instance(g, H, args.time_limit)
    report = {"schema": SCHEMA, "instance": args.file, **report}
    _emit(args, _dump(report))
    if report["agree"] is None:
        print("inconclusive: a solver reached the time limit", file=sys.stderr)
        return EXIT_TIME_LIMIT
    return EXIT_OK if report["agree"] else EXIT_DISAGREE


# parser


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    p.add_argument("--seed", type=int, default=d(0), help="random seed for gen (default 0)")
    p.add_argument("--time-limit", type=float, default=d(600.0), help="seconds per solve (default 600)")
    p.add_argument("--engine", choices=["oracle", "bnb", "external"], default=d(None),
                   help="solver engine (default: external when a solver command is set, else bnb)")
    p.add_argument("--solver-cmd", default=d(None),
                   help="external solver command with {lp} {sol} {timelimit} placeholders")
    p.add_argument("--output", "-o", default=d(None), help="write the main output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="compact-layering", description="Exact height-bounded layering of directed graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("layer", parents=[common], help="solve one instance")
    p.add_argument("file")
    p.add_argument("--model", choices=["cgl", "ext", "mml"], default="cgl")
    p.add_argument("--height", "-H", type=int)
    p.add_argument("--abs", action="store_true", help="MML with absolute instead of signed lengths")
    p.add_argument("--auto-raise", action="store_true", help="retry with H = max degree + 1 when infeasible")
    p.add_argument("--w-rev", type=Fraction)
    p.add_argument("--w-len", type=Fraction)
    p.add_argument("--w-wid", type=Fraction)
    p.set_defaults(func=cmd_layer)

    p = sub.add_parser("gen", parents=[common], help="generate random instances")
    p.add_argument("--n", type=int)
    p.add_argument("--density", type=float, default=1.5)
    p.add_argument("--suite", metavar="DIR", help="write a whole benchmark set into DIR")
    p.add_argument("--count", type=int, default=340)
    p.add_argument("--n-min", type=int, default=17)
    p.add_argument("--n-max", type=int, default=100)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", parents=[common], help="run every instance of a directory")
    p.add_argument("directory")
    p.add_argument("--models", default="CGL,MML", help="comma-separated subset of EXT,CGL,MML")
    p.add_argument("--height", "-H", type=int)
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="leave time_s empty so the CSV is reproducible")
    p.add_argument("--summary", metavar="FILE", help="also write the binned summary here")
    p.add_argument("--summary-format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bounds", parents=[common], help="height bounds of an instance")
    p.add_argument("file")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("render", parents=[common], help="draw a layering as SVG")
    p.add_argument("file")
    p.add_argument("--layering", required=True, help="JSON layering, or the output of 'layer'")
    p.add_argument("--sweeps", type=int, default=4)
    p.add_argument("--no-dummies", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", parents=[common], help="cross-check solvers and models on one instance")
    p.add_argument("file")
    p.add_argument("--height", "-H", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
