"""Batch runs over instance directories and binned summary tables."""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .bounds import default_height
from .graph import GraphFormatError, RandomGraphSpec, generate_random, read_graph, write_edge_list
from .layering import metrics
from .milp import ModelKind, build_model, check_assignment, encode_layering
from .objective import Weights, evaluate
from .solve import SolveConfig, model_objective, solve

__all__ = [
    "CSV_HEADER",
    "BenchRow",
    "SummaryRow",
    "format_summary",
    "generate_suite",
    "list_instances",
    "rows_to_csv",
    "run_bench",
    "summarize",
    "summary_to_csv",
]

CSV_HEADER = ["instance", "n", "m", "model", "engine", "status", "time_s", "W", "Wr", "len", "rev", "est_ar"]
MODELS = ("EXT", "CGL", "MML")
ERROR = "Error"
# models with at most this many variables get their encoding checked after an internal solve
ENCODING_CHECK_VARS = 20000


@dataclass
class BenchRow:
    instance: str
    n: int | None
    m: int | None
    model: str
    engine: str
    status: str
    time_s: float | None = None
    W: int | Fraction | None = None
    Wr: int | Fraction | None = None
    len: int | None = None
    rev: int | None = None
    est_ar: Fraction | None = None
    message: str = ""

    @property
    def has_metrics(self) -> bool:
        return self.W is not None

    def cells(self, with_time: bool = True) -> list[str]:
        def num(x):
            if x is None:
                return ""
            if isinstance(x, Fraction):
                return str(x.numerator) if x.denominator == 1 else f"{float(x):.6f}"
            return str(x)

        time_cell = "" if self.time_s is None or not with_time else f"{self.time_s:.3f}"
        ar = "" if self.est_ar is None else f"{float(self.est_ar):.6f}"
        return [
            self.instance, num(self.n), num(self.m), self.model, self.engine, self.status,
            time_cell, num(self.W), num(self.Wr), num(self.len), num(self.rev), ar,
        ]


def list_instances(directory) -> list[str]:
    names = [f for f in os.listdir(directory) if not f.startswith(".")]
    return sorted(os.path.join(directory, f) for f in names if os.path.isfile(os.path.join(directory, f)))


def _encoding_problem(g, H, kind, w, lay, value) -> str | None:
    """Check that the layering encodes to a feasible point of the model with the same objective."""
    model, vm = build_model(kind, g, H, w, anchor=False)
    if model.num_vars > ENCODING_CHECK_VARS:
        return None
    check = check_assignment(model, encode_layering(vm, lay))
    if not check.feasible:
        return f"encoding violates {check.violated}"
    if check.objective != value:
        return f"model objective {check.objective} differs from {value}"
    return None


def _run_one(path: str, model: str, cfg: SolveConfig, height: int | None) -> BenchRow:
    name = os.path.basename(path)
    try:
        g = read_graph(path)
    except (OSError, UnicodeDecodeError, GraphFormatError) as exc:
        return BenchRow(name, None, None, model, cfg.engine, ERROR, message=str(exc))
    H = height or default_height(g.n)
    w = Weights.default(g, H)
    try:
        res = solve(g, H, model.lower(), w, cfg)
    except Exception as exc:  # one bad instance must not end the batch
        return BenchRow(name, g.n, g.m, model, cfg.engine, ERROR, message=f"{type(exc).__name__}: {exc}")
    row = BenchRow(name, g.n, g.m, model, cfg.engine, str(res.status), res.wall_time, message=res.message)
    if res.layering is None:
        return row
    lay = res.layering
    met = metrics(g, lay)
    row.W, row.Wr, row.len, row.rev = met.width, met.real_width, met.total_length, met.reversed
    row.est_ar = Fraction(met.width) / H
    value = evaluate(g, lay, model_objective(model.lower()), w)
    if res.objective is not None and value != res.objective:
        row.status, row.message = ERROR, f"reported objective {res.objective} but layering scores {value}"
    elif cfg.engine != "external":
        problem = _encoding_problem(g, H, model.lower(), w, lay, value)
        if problem:
            row.status, row.message = ERROR, problem
    return row


def run_bench(
    paths,
    models=("CGL",),
    cfg: SolveConfig | None = None,
    height: int | None = None,
    jobs: int = 1,
) -> list[BenchRow]:
    """Solve every instance with every model; rows come back sorted by instance, then model.

    ``paths`` is a directory or a list of instance files.  Each instance gets
    H = default_height(n) unless ``height`` is given, and default weights
    computed for that H.
    """
    cfg = cfg or SolveConfig()
    if isinstance(paths, (str, os.PathLike)):
        paths = list_instances(paths)
    models = [m.upper() for m in models]
    for m in models:
        if m not in MODELS:
            raise ValueError(f"unknown model {m!r}")
    tasks = [(p, m) for p in sorted(paths) for m in models]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_one, p, m, cfg, height) for p, m in tasks]
            rows = [f.result() for f in futures]
    else:
        rows = [_run_one(p, m, cfg, height) for p, m in tasks]
    order = {m: i for i, m in enumerate(MODELS)}
    rows.sort(key=lambda r: (r.instance, order[r.model]))
    return rows


def rows_to_csv(rows: list[BenchRow], with_time: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.cells(with_time))
    return buf.getvalue()


def generate_suite(directory, count: int = 340, n_min: int = 17, n_max: int = 100,
                   density: float = 1.5, seed: int = 0) -> list[str]:
    """Write ``count`` random instances with n spread evenly over [n_min, n_max]."""
    if count < 1 or n_min < 2 or n_max < n_min:
        raise ValueError("need count >= 1 and 2 <= n_min <= n_max")
    os.makedirs(directory, exist_ok=True)
    span = n_max - n_min + 1
    written = []
    for i in range(count):
        n = n_min + (i * span) // count
        g = generate_random(RandomGraphSpec(n, density, seed + i))
        path = os.path.join(directory, f"random_n{n:03d}_{i:03d}.txt")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(write_edge_list(g))
        written.append(path)
    return written


# summaries


@dataclass
class SummaryRow:
    lo: int
    hi: int
    model: str
    count: int
    stats: dict[str, tuple[float, float]]

    @property
    def bin_label(self) -> str:
        return f"[{self.lo}, {self.hi})"


SUMMARY_FIELDS = ("n", "m", "W", "len", "rev")


def _mean_sd(xs: list[float]) -> tuple[float, float]:
    if len(xs) == 1:
        return float(xs[0]), 0.0
    return statistics.fmean(xs), statistics.pstdev(xs)


def summarize(rows: list[BenchRow], bin_width: int = 15, origin: int = 15) -> list[SummaryRow]:
    """Count, mean and population standard deviation per vertex-count bin and model.

    Only rows carrying a layering contribute.  Bins are ``[origin + i*bin_width,
    origin + (i+1)*bin_width)``; only non-empty bins are reported.
    """
    if not rows:
        raise ValueError("nothing to summarize")
    groups: dict[tuple[int, str], list[BenchRow]] = {}
    for row in rows:
        if not row.has_metrics:
            continue
        i = math.floor((row.n - origin) / bin_width)
        groups.setdefault((i, row.model), []).append(row)
    order = {m: i for i, m in enumerate(MODELS)}
    out = []
    for (i, model) in sorted(groups, key=lambda key: (key[0], order.get(key[1], 99))):
        members = groups[(i, model)]
        stats = {f: _mean_sd([float(getattr(r, f)) for r in members]) for f in SUMMARY_FIELDS}
        lo = origin + i * bin_width
        out.append(SummaryRow(lo, lo + bin_width, model, len(members), stats))
    return out


def summary_to_csv(summary: list[SummaryRow]) -> str:
    buf = io.StringIO()
    buf.write("# sd: population\n")
    writer = csv.writer(buf, lineterminator="\n")
    header = ["bin_lo", "bin_hi", "model", "count"]
    for f in SUMMARY_FIELDS:
        header += [f"{f}_mean", f"{f}_sd"]
    writer.writerow(header)
    for s in summary:
        cells = [s.lo, s.hi, s.model, s.count]
        for f in SUMMARY_FIELDS:
            mean, sd = s.stats[f]
            cells += [f"{mean:.4f}", f"{sd:.4f}"]
        writer.writerow(cells)
    return buf.getvalue()


def format_summary(summary: list[SummaryRow]) -> str:
    """Aligned text table: one line per bin and model, ``mean [sd]`` cells."""
    header = ["Node Counts", "I", "n", "e", "model", "W", "EL", "RE"]
    lines = [header]
    last_bin = None
    for s in summary:
        def cell(f):
            mean, sd = s.stats[f]
            return f"{mean:.1f} [{sd:.1f}]"

        first = s.bin_label != last_bin
        lines.append([
            s.bin_label if first else "",
            str(s.count) if first else "",
            cell("n") if first else "",
            cell("m") if first else "",
            s.model,
            cell("W"),
            cell("len"),
            cell("rev"),
        ])
        last_bin = s.bin_label
    widths = [max(len(r[j]) for r in lines) for j in range(len(header))]
    text = []
    for r in lines:
        parts = [r[0].ljust(widths[0]), r[4].ljust(widths[4])]
        parts.insert(1, "  ".join(r[j].rjust(widths[j]) for j in (1, 2, 3)))
        parts += [r[j].rjust(widths[j]) for j in (5, 6, 7)]
        text.append("  ".join(parts).rstrip())
    return "# sd: population\n" + "\n".join(text) + "\n"
