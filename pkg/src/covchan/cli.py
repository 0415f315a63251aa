"""Command-line front end: solve points, sweep grids, verify maps, export problems.

Exit codes: 0 success, 1 argument or I/O error, 2 solver failure or a
verification tolerance breach.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import channel, irreps, scenarios, sdp
from .irreps import Scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

_TAGS = [s.value for s in Scenario]


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad arguments; we reserve 2 for solver
    failures, so usage problems are remapped to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _report(pairs) -> None:
    width = max(len(k) for k, _ in pairs) + 2
    for key, value in pairs:
        print(f"{key:<{width}}{value}")


def _num(v) -> str:
    return "" if v is None else f"{v:.12g}"


def _flag(v) -> str:
    return "true" if v else "false"


# ------------------------------------------------------------------ solve

def cmd_solve(args) -> int:
    scen = Scenario(args.scenario)
    fid, choi, sol = scenarios.solve_point(scen, args.a, args.c, ppt=args.ppt, tol=args.tol)
    if args.ppt:
        fid_free, _, _ = scenarios.solve_point(scen, args.a, args.c, ppt=False, tol=args.tol)
    else:
        fid_free = fid
    rep = scenarios.verify_covariance(choi, scen, seed=args.seed)
    kraus = channel.kraus_from_choi(choi)
    _report(
        [
            ("scenario", scen.value),
            ("a", _num(args.a)),
            ("c", _num(args.c)),
            ("ppt", _flag(args.ppt)),
            ("fidelity", _num(fid)),
            ("fidelity_noppt", _num(fid_free)),
            ("analytic", _num(scenarios.analytic_fidelity(scen, args.a, args.c))),
            ("gap", f"{sol.gap:.3e}"),
            ("covariance", f"{rep.commutator:.3e}"),
            ("fidelity_shift", f"{rep.fidelity_deviation:.3e}"),
            ("kraus_count", str(len(kraus))),
            ("identity_optimal", _flag(scenarios.identity_optimal_flag(scen, args.a, args.c, fid))),
            ("iterations", str(sol.iterations)),
            ("status", sol.status),
        ]
    )
    return EXIT_OK


# ------------------------------------------------------------------ sweep

def cmd_sweep(args) -> int:
    scen = Scenario(args.scenario)
    grid = args.grid
    if grid is None:
        grid = 101 if scen is Scenario.PROTOCOL else 51
    jobs = args.jobs if args.jobs else os.cpu_count() or 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            def mapper(fn, tasks):
                return pool.map(fn, list(tasks), chunksize=8)

            surface = scenarios.grid_sweep(scen, grid, ppt=args.ppt, tol=args.tol, pool_map=mapper)
    else:
        surface = scenarios.grid_sweep(scen, grid, ppt=args.ppt, tol=args.tol)
    try:
        with open(args.out, "w") as fh:
            fh.write(surface.to_csv())
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = len(surface.points)
    print(f"wrote {rows} rows to {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------ verify

def _verify_lines(name, value, tol):
    ok = value <= tol
    return (name, f"{value:.3e} (tol {tol:.0e}) {'PASS' if ok else 'FAIL'}"), ok


def cmd_verify(args) -> int:
    scen = Scenario(args.scenario)
    tp_tol = args.check_tol if args.check_tol else 1e-10
    cov_tol = args.check_tol if args.check_tol else 1e-8
    fid_tol = args.check_tol if args.check_tol else 1e-6

    if scen in (Scenario.FULL_SIM, Scenario.FULL_IND):
        head = [("scenario", scen.value)]
        if scen is Scenario.FULL_SIM:
            d011 = args.d011
            if d011 is None:
                lo, hi = scenarios.published_ppt_interval()
                d011 = 0.5 * (lo + hi)
                head += [("ppt_window", f"[{lo:.12g}, {hi:.12g}]")]
            head += [("d011", _num(d011))]
            ops = scenarios.published_kraus(scen, d011)
        else:
            ops = scenarios.published_kraus(scen)
        tp = float(np.abs(sum(k.conj().T @ k for k in ops) - np.eye(4)).max())
        choi = channel.choi_from_kraus(ops)
        rep = scenarios.verify_covariance(choi, scen, seed=args.seed)
        dev = 0.0
        for a, c in [(0.0, 1.0), (0.3, 0.8), (0.5, 0.5), (0.7, 0.2), (0.9, 0.4)]:
            got = channel.channel_fidelity(choi, channel.SchmidtState(a), channel.SchmidtState(c))
            b1 = scenarios.analytic_fidelity(Scenario.SEMICOV, min(a, c), max(a, c))
            if scen is Scenario.FULL_SIM:
                want = b1 / 10 + 0.6 * (c * c * (1 - a * a) + a * a * (1 - c * c))
            else:
                want = b1 / 9 + (4 / 9) * (c * c * (1 - a * a) + a * a * (1 - c * c))
            dev = max(dev, abs(got - want))
        checks = [
            _verify_lines("tp_residual", tp, tp_tol),
            _verify_lines("covariance", rep.commutator, cov_tol),
            _verify_lines("fidelity_branch_dev", dev, fid_tol),
        ]
    elif scen is Scenario.PROTOCOL:
        if args.a is None:
            raise ValueError("protocol verification needs --a")
        tol = min(args.tol, 1e-11)
        fid, _, sol = scenarios.solve_point(scen, args.a, ppt=True, tol=tol)
        params = scenarios.harvest_appendix_params(sol.x)
        ops = scenarios.appendix_kraus(params)
        tp = float(np.abs(sum(k.conj().T @ k for k in ops) - np.eye(4)).max())
        choi = channel.choi_from_kraus(ops)
        rep = scenarios.verify_covariance(choi, scen, seed=args.seed)
        got = channel.channel_fidelity(choi, channel.SchmidtState(args.a), channel.SchmidtState(args.a))
        head = [("scenario", scen.value), ("a", _num(args.a)), ("sdp_fidelity", _num(fid)),
                ("kraus_count", str(len(ops)))]
        checks = [
            _verify_lines("tp_residual", tp, tp_tol),
            _verify_lines("covariance", rep.commutator, cov_tol),
            _verify_lines("fidelity_vs_sdp", abs(got - fid), fid_tol),
        ]
    else:
        raise ValueError(f"no published map to verify for {scen.value}")

    lines = head + [line for line, _ in checks]
    _report(lines)
    if all(ok for _, ok in checks):
        print("PASS")
        return EXIT_OK
    print("FAIL")
    return EXIT_FAILURE


# ------------------------------------------------------------------ export

def cmd_export(args) -> int:
    scen = Scenario(args.scenario)
    problem = scenarios.build_problem(scen, args.a, args.c, ppt=args.ppt)
    text = sdp.export_json(problem)
    try:
        with open(args.out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {problem.name} ({len(problem.labels)} variables) to {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------ irreps

def cmd_irreps(args) -> int:
    basis = irreps.table1_basis()
    m = basis.matrix
    ortho = float(np.abs(m @ m.conj().T - np.eye(16)).max())
    pairs = [("basis_orthonormality", f"{ortho:.3e}")]
    for b in basis.blocks:
        pairs.append((f"block_j{b.j}_copy{b.copy}", f"dimension {2 * b.j + 1}"))
    targets = [Scenario(args.scenario)] if args.scenario else list(Scenario)
    rng = np.random.default_rng(args.seed)
    for scen in targets:
        ansatz = irreps.covariant_ansatz(scen)
        dim = irreps.commutant_dimension(scen, samples=args.samples, seed=args.seed)
        worst = 0.0
        for _ in range(args.samples):
            g = irreps.group_element(scen, irreps.haar_su2(rng), irreps.haar_su2(rng))
            worst = max(worst, float(max(np.abs(bm @ g - g @ bm).max() for bm in ansatz.matrices)))
        pairs.append(
            (f"{scen.value}", f"ansatz {len(ansatz)} params, commutant {dim}, residual {worst:.3e}")
        )
    _report(pairs)
    return EXIT_OK


# ------------------------------------------------------------------- main

def _build_parser() -> _Parser:
    parser = _Parser(prog="covchan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_point=True):
        p.add_argument("--scenario", required=True, choices=_TAGS)
        if need_point:
            p.add_argument("--a", type=float, required=True, help="input Schmidt weight")
            p.add_argument("--c", type=float, help="target Schmidt weight (not used by protocol)")
        p.add_argument("--ppt", action=argparse.BooleanOptionalAction, default=True,
                       help="keep the channel PPT across the two parties")
        p.add_argument("--tol", type=float, default=1e-7, help="solver gap tolerance")
        p.add_argument("--seed", type=int, default=0, help="Haar sampling seed")

    p = sub.add_parser("solve", help="optimize one conversion point")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="fidelity surface to CSV")
    common(p, need_point=False)
    p.add_argument("--grid", type=int, help="grid size (default 51, protocol 101)")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--jobs", type=int, help="worker processes (default: cpu count)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check published Kraus families")
    p.add_argument("--scenario", required=True, choices=_TAGS)
    p.add_argument("--a", type=float, help="protocol Schmidt weight")
    p.add_argument("--d011", type=float, help="free parameter of the simultaneous family")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--check-tol", type=float, help="override all verification tolerances")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write one problem as JSON for the oracle")
    common(p)
    p.add_argument("--out", required=True, help="JSON output path")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("irreps", help="basis and commutant diagnostics")
    p.add_argument("--scenario", choices=_TAGS)
    p.add_argument("--samples", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_irreps)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "a", None) is not None and hasattr(args, "c"):
        scen = Scenario(args.scenario)
        if scen is not Scenario.PROTOCOL and args.c is None and args.command in ("solve", "export"):
            parser.error(f"{scen.value} needs --c")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"{parser.prog}: solver error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
