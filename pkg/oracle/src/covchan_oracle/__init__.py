"""Re-solve exported block SDP problems with cvxpy and report the optimum.

This package deliberately shares no code with the solver it checks: problems
arrive as JSON documents (labels, objective, Hermitian pencils as [re, im]
pairs, equality rows), are rebuilt here from the file alone, and are handed
to an established conic stack.  Agreement between the two optima validates
the export path and the native solver; it cannot validate the modeling that
produced the export, which is what the frozen-value tests in the main
package are for.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

__all__ = [
    "MalformedProblemError",
    "OracleResult",
    "load_problem",
    "oracle_solve",
    "result_csv",
]

CSV_HEADER = "id,objective,status,seconds"


class MalformedProblemError(ValueError):
    """The JSON document does not follow the export schema."""


@dataclass(frozen=True)
class OracleResult:
    id: str
    objective: float
    status: str
    seconds: float


def _complex_from_pairs(entry, what: str) -> np.ndarray:
    arr = np.asarray(entry, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise MalformedProblemError(f"{what}: expected an n x n grid of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def load_problem(path) -> dict:
    """Parse one exported problem into numpy form."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise MalformedProblemError(f"cannot read problem file: {err}") from err
    try:
        objective = np.asarray(doc["objective"], dtype=float)
        pencils = [
            {
                "name": p["name"],
                "constant": _complex_from_pairs(p["constant"], f"pencil {p['name']} constant"),
                "mats": np.stack(
                    [_complex_from_pairs(m, f"pencil {p['name']} mats") for m in p["mats"]]
                ),
            }
            for p in doc["pencils"]
        ]
        rows = np.asarray(doc["equalities"]["rows"], dtype=float)
        rhs = np.asarray(doc["equalities"]["rhs"], dtype=float)
        problem = {
            "id": str(doc["id"]),
            "labels": list(doc["labels"]),
            "objective": objective,
            "pencils": pencils,
            "eq_rows": rows.reshape(len(rhs), -1) if rhs.size else rows.reshape(0, len(objective)),
            "eq_rhs": rhs,
        }
    except (KeyError, TypeError, ValueError) as err:
        if isinstance(err, MalformedProblemError):
            raise
        raise MalformedProblemError(f"bad problem document: {err}") from err
    m = len(problem["objective"])
    for p in problem["pencils"]:
        if p["mats"].shape[0] != m:
            raise MalformedProblemError(
                f"pencil {p['name']} has {p['mats'].shape[0]} mats for {m} variables"
            )
    if problem["eq_rows"].size and problem["eq_rows"].shape[1] != m:
        raise MalformedProblemError("equality rows do not match the variable count")
    return problem


def _real_embedding(mat: np.ndarray) -> np.ndarray:
    # Hermitian M >= 0  <=>  [[Re M, -Im M], [Im M, Re M]] >= 0
    return np.block([[mat.real, -mat.imag], [mat.imag, mat.real]])


def oracle_solve(path) -> OracleResult:
    """Maximize the exported objective under its pencil and equality rows."""
    problem = load_problem(path)
    m = len(problem["objective"])
    x = cp.Variable(m)
    constraints = []
    for p in problem["pencils"]:
        terms = _real_embedding(p["constant"]) + cp.sum(
            [x[k] * _real_embedding(p["mats"][k]) for k in range(m)]
        )
        constraints.append(terms >> 0)
    if problem["eq_rhs"].size:
        constraints.append(problem["eq_rows"] @ x == problem["eq_rhs"])
    program = cp.Problem(cp.Maximize(problem["objective"] @ x), constraints)
    start = time.perf_counter()
    try:
        program.solve(solver=cp.CLARABEL)
        clean = program.status == "optimal"
    except cp.error.SolverError:
        clean = False
    if not clean:
        # retry with a second solver before reporting a degraded status
        program.solve(solver=cp.SCS, eps_abs=1e-10, eps_rel=1e-10, max_iters=200_000)
    seconds = time.perf_counter() - start
    value = float(program.value) if program.value is not None else float("nan")
    return OracleResult(problem["id"], value, str(program.status), seconds)


def result_csv(result: OracleResult) -> str:
    return (
        f"{CSV_HEADER}\n"
        f"{result.id},{result.objective:.12g},{result.status},{result.seconds:.3f}\n"
    )
