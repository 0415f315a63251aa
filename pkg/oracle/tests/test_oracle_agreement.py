"""Cross-validation against the main package through its public surfaces only.

Problems are generated with the `covchan export` command and reference values
read from `covchan solve` text output; nothing is imported from the package
under test, so any modeling drift between its solver and this stack shows up
as a numeric disagreement here.
"""
from __future__ import annotations

import json
import shutil
import subprocess
from dataclasses import dataclass

import pytest

from covchan_oracle import MalformedProblemError, load_problem, oracle_solve, result_csv
from covchan_oracle.cli import main as oracle_main

COVCHAN = shutil.which("covchan")
pytestmark = pytest.mark.skipif(COVCHAN is None, reason="covchan CLI is not installed")

TWO_STATE_POINTS = [
    (0.0, 1.0, True),
    (0.3, 0.8, False),
    (0.6, 0.8, True),
    (0.5, 0.5, True),
    (0.8, 0.3, False),
    (0.9, 0.1, True),
    (0.2, 0.9, False),
    (0.7, 0.7, True),
    (0.45, 0.55, False),
    (1.0, 0.0, True),
]
PROTOCOL_POINTS = [
    (0.0, True),
    (0.15, False),
    (0.25, True),
    (0.70710678, True),
    (0.35, False),
    (0.5, True),
    (0.6, False),
    (0.8, True),
    (0.9, False),
    (1.0, True),
]


@dataclass(frozen=True)
class Comparison:
    scenario: str
    a: float
    c: float | None
    ppt: bool
    primary: float
    oracle: object


def _run(args):
    return subprocess.run(
        [COVCHAN, *args], capture_output=True, text=True, check=True, timeout=300
    )


def _primary_fidelity(scenario, a, c, ppt) -> float:
    args = ["solve", "--scenario", scenario, "--a", str(a)]
    if c is not None:
        args += ["--c", str(c)]
    args.append("--ppt" if ppt else "--no-ppt")
    out = _run(args).stdout
    for line in out.splitlines():
        fields = line.split()
        if fields and fields[0] == "fidelity":
            return float(fields[1])
    raise AssertionError(f"no fidelity line in solve output:\n{out}")


def _export(scenario, a, c, ppt, path) -> None:
    args = ["export", "--scenario", scenario, "--a", str(a), "--out", str(path)]
    if c is not None:
        args += ["--c", str(c)]
    args.append("--ppt" if ppt else "--no-ppt")
    _run(args)


@pytest.fixture(scope="session")
def comparisons(tmp_path_factory):
    workdir = tmp_path_factory.mktemp("problems")
    records = []
    jobs = [("semicov", p) for p in TWO_STATE_POINTS]
    jobs += [("full-sim", p) for p in TWO_STATE_POINTS]
    jobs += [("full-ind", p) for p in TWO_STATE_POINTS]
    jobs += [("protocol", (a, None, ppt)) for a, ppt in PROTOCOL_POINTS]
    for idx, (scenario, (a, c, ppt)) in enumerate(jobs):
        path = workdir / f"problem_{idx:02d}.json"
        _export(scenario, a, c, ppt, path)
        records.append(
            Comparison(scenario, a, c, ppt, _primary_fidelity(scenario, a, c, ppt), oracle_solve(path))
        )
    return records


def test_oracle_agrees_with_primary_everywhere(comparisons, criterion_log):
    worst = max(abs(r.oracle.objective - r.primary) for r in comparisons)
    per_scenario = {r.scenario for r in comparisons}
    ok = worst <= 1e-5 and len(per_scenario) == 4
    criterion_log(
        11,
        ok,
        f"oracle vs primary: max dev {worst:.2e} over {len(comparisons)} problems, "
        "10 per scenario, mixed ppt flags",
    )
    assert ok, f"max disagreement {worst:.3e}"


def test_oracle_statuses_and_ranges(comparisons):
    for r in comparisons:
        assert r.oracle.status == "optimal", (r.scenario, r.a, r.c, r.oracle.status)
        assert -1e-6 <= r.oracle.objective <= 1 + 1e-6
        assert r.oracle.seconds >= 0.0


def test_known_optima_from_exports(comparisons):
    def find(scenario, a, c, ppt):
        return next(
            r for r in comparisons
            if r.scenario == scenario and r.a == a and r.c == c and r.ppt == ppt
        )

    assert find("semicov", 0.6, 0.8, True).oracle.objective == pytest.approx(0.9216, abs=1e-5)
    assert find("full-ind", 0.0, 1.0, True).oracle.objective == pytest.approx(4 / 9, abs=1e-5)
    assert find("protocol", 0.70710678, None, True).oracle.objective == pytest.approx(0.5, abs=1e-4)


def test_result_csv_shape(comparisons):
    csv = result_csv(comparisons[0].oracle)
    header, row, tail = csv.split("\n")
    assert header == "id,objective,status,seconds"
    assert tail == ""
    fields = row.split(",")
    assert len(fields) == 4
    float(fields[1]), float(fields[3])


def test_cli_round_trip(tmp_path, capsys):
    problem = tmp_path / "problem.json"
    _export("full-ind", 0.3, 0.8, True, problem)
    out_csv = tmp_path / "result.csv"
    code = oracle_main([str(problem), "--out", str(out_csv)])
    captured = capsys.readouterr().out
    assert code == 0
    assert captured.startswith("id,objective,status,seconds\n")
    assert out_csv.read_text() == captured
    row = captured.strip().split("\n")[1].split(",")
    assert row[0] == "full-ind-a0.300000-c0.800000-ppt"
    assert row[2] == "optimal"


def test_cli_rejects_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert oracle_main([str(bad)]) == 1
    assert "covchan-oracle" in capsys.readouterr().err


def test_loader_schema_checks(tmp_path):
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"id": "x"}))
    with pytest.raises(MalformedProblemError):
        load_problem(missing)

    ragged = tmp_path / "ragged.json"
    ragged.write_text(
        json.dumps(
            {
                "id": "x",
                "labels": ["x"],
                "objective": [1.0],
                "pencils": [{"name": "p", "constant": [[[1.0]]], "mats": [[[[0.0, 0.0]]]]}],
                "equalities": {"rows": [], "rhs": []},
            }
        )
    )
    with pytest.raises(MalformedProblemError):
        load_problem(ragged)

    mismatched = tmp_path / "mismatched.json"
    mismatched.write_text(
        json.dumps(
            {
                "id": "x",
                "labels": ["x", "y"],
                "objective": [1.0, 2.0],
                "pencils": [
                    {"name": "p", "constant": [[[1.0, 0.0]]], "mats": [[[[1.0, 0.0]]]]}
                ],
                "equalities": {"rows": [], "rhs": []},
            }
        )
    )
    with pytest.raises(MalformedProblemError):
        load_problem(mismatched)
