"""Command line entry: solve one exported problem file, emit the result row."""
from __future__ import annotations

import argparse
import sys

from . import MalformedProblemError, oracle_solve, result_csv


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="covchan-oracle",
        description="Re-solve an exported block SDP with cvxpy and print a CSV row.",
    )
    parser.add_argument("problem", help="path to an exported problem JSON file")
    parser.add_argument("--out", help="also write the CSV to this path")
    args = parser.parse_args(argv)
    try:
        result = oracle_solve(args.problem)
    except MalformedProblemError as err:
        print(f"covchan-oracle: {err}", file=sys.stderr)
        return 1
    csv = result_csv(result)
    print(csv, end="")
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(csv)
        except OSError as err:
            print(f"covchan-oracle: {err}", file=sys.stderr)
            return 1
    return 0 if result.status in ("optimal", "optimal_inaccurate") else 2


if __name__ == "__main__":
    sys.exit(main())
