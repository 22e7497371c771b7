"""Solve an LP file with HiGHS and write a ``name value`` solution file.

Usage::

    python3 -m compact_layering.solve.highs_runner MODEL.lp OUT.sol TIMELIMIT

Meant as a ready-made command template for the external bridge::

    python3 -m compact_layering.solve.highs_runner {lp} {sol} {timelimit}
"""

from __future__ import annotations

import argparse
import sys


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("lp")
    parser.add_argument("sol")
    parser.add_argument("timelimit", type=float)
    args = parser.parse_args(argv)

    try:
        import highspy
    except ImportError:
        print("highspy is not installed (pip install 'compact-layering[highs]')", file=sys.stderr)
        return 1

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.timelimit)
    h.setOptionValue("threads", 1)
    if h.readModel(args.lp) == highspy.HighsStatus.kError:
        print(f"HiGHS could not read {args.lp}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    ms = highspy.HighsModelStatus
    with open(args.sol, "w", encoding="utf-8") as fh:
        if status == ms.kInfeasible:
            fh.write("status infeasible\n")
            return 0
        info = h.getInfo()
        has_solution = info.primal_solution_status == 2
        if status == ms.kOptimal:
            fh.write("status optimal\n")
        elif status == ms.kTimeLimit:
            fh.write("status timelimit\n" if not has_solution else "status feasible\n")
        else:
            print(f"HiGHS finished with status {h.modelStatusToString(status)}", file=sys.stderr)
            return 1
        if not has_solution:
            return 0
        fh.write(f"objective {info.objective_function_value!r}\n")
        lp = h.getLp()
        values = h.getSolution().col_value
        for name, value in zip(lp.col_names_, values):
            fh.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
