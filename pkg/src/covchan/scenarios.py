"""Assembly and solution of the four covariant channel-optimization scenarios.

For each covariance group the Choi operator is expanded in the commutant
basis from :mod:`covchan.irreps`; the conversion fidelity becomes a linear
functional of the coefficients, trace preservation a small equality system,
and complete positivity (optionally with the PPT restriction on Bob's
qubits) a pair of 16x16 pencil constraints.  :func:`solve_point` feeds the
resulting program to :mod:`covchan.sdp`.

Also provided: closed-form fidelity branches, the two published 9-operator
Kraus families with their free-parameter PPT window, the 14-operator block
construction read off converged exchange-protocol solutions, fidelity
surfaces with CSV export, and the identity-optimality region map.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import sdp
from .channel import (
    SchmidtState,
    channel_fidelity,
    check_ppt,
    choi_from_kraus,
    plus_operator,
)
from .irreps import (
    Scenario,
    covariant_ansatz,
    group_element,
    rotation_pair,
    scenario_similarity,
)
from .linalg import haar_su2, kron, partial_trace, partial_transpose

__all__ = [
    "Scenario",
    "analytic_fidelity",
    "objective_vector",
    "tp_constraint_rows",
    "build_problem",
    "depolarizing_coordinates",
    "choi_from_coordinates",
    "solve_point",
    "CovarianceReport",
    "verify_covariance",
    "published_kraus",
    "published_ppt_interval",
    "APPENDIX_LABELS",
    "appendix_kraus",
    "harvest_appendix_params",
    "SurfacePoint",
    "FidelitySurface",
    "grid_sweep",
    "IdentityRegion",
    "identity_region",
    "CSV_HEADER",
    "identity_optimal_flag",
]


# ------------------------------------------------------------- closed forms

def _branch_one(a: float, c: float) -> float:
    return (a * c + np.sqrt((1 - a * a) * (1 - c * c))) ** 2


def _cross(a: float, c: float) -> float:
    return c * c * (1 - a * a) + a * a * (1 - c * c)


def analytic_fidelity(scenario: Scenario, a: float, c: float | None = None):
    """Closed-form optimal fidelity, or None where no formula applies.

    Semicovariant: valid only for a <= c.  The two full-covariance cases are
    the max of the trivial branch and a depolarizing-type branch.  The
    exchange protocol has no closed form.
    """
    scenario = Scenario(scenario)
    if scenario is Scenario.PROTOCOL:
        return None
    if c is None:
        raise ValueError(f"{scenario.value} needs a target weight c")
    if scenario is Scenario.SEMICOV:
        return _branch_one(a, c) if a <= c else None
    b1 = _branch_one(a, c)
    if scenario is Scenario.FULL_SIM:
        return max(b1, b1 / 10 + 0.6 * _cross(a, c))
    return max(b1, b1 / 9 + (4 / 9) * _cross(a, c))


# ------------------------------------------------------ program ingredients

def _states(scenario: Scenario, a: float, c: float | None):
    """(input, target) Schmidt states; the protocol converts a state to itself."""
    if scenario is Scenario.PROTOCOL:
        s = SchmidtState(a)
        return s, s
    if c is None:
        raise ValueError(f"{scenario.value} needs a target weight c")
    return SchmidtState(a), SchmidtState(c)


def objective_vector(scenario: Scenario, a: float, c: float | None = None) -> np.ndarray:
    """Per-parameter fidelity coefficients Tr[(rho_t o rho_in^T) B_k]."""
    scenario = Scenario(scenario)
    src, tgt = _states(scenario, a, c)
    w = np.kron(tgt.density, src.density.T)
    ansatz = covariant_ansatz(scenario)
    return np.einsum("ij,kji->k", w, ansatz.matrices).real


@lru_cache(maxsize=None)
def tp_constraint_rows(scenario: Scenario):
    """Independent real rows (A, b) encoding Tr_out(sum x_k B_k) = identity."""
    scenario = Scenario(scenario)
    ansatz = covariant_ansatz(scenario)
    traced = np.array([partial_trace(m, [4, 4], keep=[1]) for m in ansatz.matrices])
    rows, rhs = [], []
    for i in range(4):
        rows.append(traced[:, i, i].real)
        rhs.append(1.0)
        for j in range(i + 1, 4):
            rows.append(traced[:, i, j].real)
            rhs.append(0.0)
            rows.append(traced[:, i, j].imag)
            rhs.append(0.0)
    a = np.array(rows)
    b = np.array(rhs)
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    rank = int((sv > sv[0] * 1e-12).sum())
    basis = u[:, :rank].T
    return basis @ a, basis @ b


@lru_cache(maxsize=None)
def _cp_pencil(scenario: Scenario) -> sdp.Pencil:
    mats = covariant_ansatz(scenario).matrices
    return sdp.Pencil("cp", np.zeros((16, 16), complex), mats)


@lru_cache(maxsize=None)
def _ppt_pencil(scenario: Scenario) -> sdp.Pencil:
    mats = covariant_ansatz(scenario).matrices
    pt = np.array([partial_transpose(m, [2, 2, 2, 2], transposed=[1, 3]) for m in mats])
    return sdp.Pencil("ppt", np.zeros((16, 16), complex), pt)


def _point_id(scenario: Scenario, a: float, c: float | None, ppt: bool) -> str:
    parts = [scenario.value, f"a{a:.6f}"]
    if scenario is not Scenario.PROTOCOL and c is not None:
        parts.append(f"c{c:.6f}")
    parts.append("ppt" if ppt else "noppt")
    return "-".join(parts)


def build_problem(
    scenario: Scenario,
    a: float,
    c: float | None = None,
    ppt: bool = True,
    restrict_to: tuple[str, ...] | None = None,
) -> sdp.SdpProblem:
    """Block-reduced program whose optimum is the best conversion fidelity.

    ``restrict_to`` pins every parameter outside the named labels to zero via
    extra equality rows (used to land on a specific face of the optimal set).
    """
    scenario = Scenario(scenario)
    ansatz = covariant_ansatz(scenario)
    rows, rhs = tp_constraint_rows(scenario)
    if restrict_to is not None:
        keep = set(restrict_to)
        extra = [
            np.eye(len(ansatz))[k]
            for k, lab in enumerate(ansatz.labels)
            if lab not in keep
        ]
        if extra:
            rows = np.vstack([rows, extra])
            rhs = np.concatenate([rhs, np.zeros(len(extra))])
    pencils = [_cp_pencil(scenario)]
    if ppt:
        pencils.append(_ppt_pencil(scenario))
    return sdp.SdpProblem(
        objective=objective_vector(scenario, a, c),
        pencils=tuple(pencils),
        eq_rows=rows,
        eq_rhs=rhs,
        labels=ansatz.labels,
        name=_point_id(scenario, a, c, ppt),
    )


@lru_cache(maxsize=None)
def depolarizing_coordinates(scenario: Scenario) -> np.ndarray:
    """Coefficients of the fully depolarizing Choi operator I/4.

    Strictly feasible for every scenario and both pencils (margin 1/4), so it
    serves as the solver's interior starting point.
    """
    mats = covariant_ansatz(Scenario(scenario)).matrices
    gram = np.einsum("kij,lji->kl", mats, mats).real
    rhs = np.einsum("kii->k", mats).real / 4.0
    return np.linalg.solve(gram, rhs)


def choi_from_coordinates(scenario: Scenario, x: np.ndarray) -> np.ndarray:
    return np.einsum("k,kij->ij", np.asarray(x, float), covariant_ansatz(Scenario(scenario)).matrices)


def solve_point(
    scenario: Scenario,
    a: float,
    c: float | None = None,
    ppt: bool = True,
    tol: float = 1e-8,
    max_iter: int = 500,
):
    """Optimal fidelity at one state pair: (fidelity, Choi operator, solution)."""
    scenario = Scenario(scenario)
    problem = build_problem(scenario, a, c, ppt=ppt)
    sol = sdp.solve(
        problem, tol=tol, max_iter=max_iter, initial=depolarizing_coordinates(scenario)
    )
    if sol.status != "optimal":
        raise RuntimeError(
            f"solver returned {sol.status} for {problem.name} (gap {sol.gap:.2e})"
        )
    return float(sol.objective), choi_from_coordinates(scenario, sol.x), sol


# ----------------------------------------------------- covariance checking

class CovarianceReport(NamedTuple):
    """Worst-case commutator norm and fidelity shift under group rotations."""

    commutator: float
    fidelity_deviation: float


def verify_covariance(
    choi: np.ndarray,
    scenario: Scenario,
    samples: int = 20,
    seed: int = 0,
    a: float = 0.3,
    c: float = 0.8,
) -> CovarianceReport:
    """Check [R, g(U)] = 0 over Haar samples, plus rotation invariance of F."""
    scenario = Scenario(scenario)
    rng = np.random.default_rng(seed)
    src, tgt = SchmidtState(a), SchmidtState(c)
    base = channel_fidelity(choi, src, tgt)
    worst_comm = 0.0
    worst_fid = 0.0
    for _ in range(samples):
        u, u2 = haar_su2(rng), haar_su2(rng)
        g = group_element(scenario, u, u2)
        worst_comm = max(worst_comm, float(np.linalg.norm(choi @ g - g @ choi)))
        v1, v2 = rotation_pair(scenario, u, u2)
        rotated = channel_fidelity(
            choi, v1 @ src.density @ v1.conj().T, v2 @ tgt.density @ v2.conj().T
        )
        worst_fid = max(worst_fid, abs(rotated - base))
    return CovarianceReport(worst_comm, worst_fid)


# ------------------------------------------------------ published channels

def published_kraus(scenario: Scenario, d011: float | None = None) -> np.ndarray:
    """The printed 9-operator Kraus families for the two full-covariance maps.

    The simultaneous-rotation family carries one free parameter d011 in
    [0, 1]; the first two operators use weight (1 - d011)/6, which is the
    value required by trace preservation (the printed prefactor 1/3 breaks
    sum A^dag A = 1 for every d011 < 1).
    """
    scenario = Scenario(scenario)
    if scenario is Scenario.FULL_SIM:
        if d011 is None:
            raise ValueError("the simultaneous-rotation family needs d011")
        if not 0.0 <= d011 <= 1.0:
            raise ValueError(f"d011 must lie in [0, 1], got {d011}")
        k12 = (1 - d011) / 6
        ops = np.zeros((9, 4, 4))
        ops[0, 0, 1], ops[0, 0, 2] = -1, 1
        ops[0] *= np.sqrt(k12)
        ops[1, 3, 1], ops[1, 3, 2] = 1, -1
        ops[1] *= np.sqrt(k12)
        ops[2, 1, 1], ops[2, 1, 2] = -1, 1
        ops[2, 2, 1], ops[2, 2, 2] = -1, 1
        ops[2] *= np.sqrt((1 - d011) / 12)
        ops[3, 1, 1], ops[3, 1, 2] = 1, -1
        ops[3, 2, 1], ops[3, 2, 2] = -1, 1
        ops[3] *= np.sqrt(d011) / 2
        ops[4, 0, 0] = ops[4, 3, 3] = 1
        ops[4, 1, 1] = ops[4, 1, 2] = ops[4, 2, 1] = ops[4, 2, 2] = -1
        ops[4] /= np.sqrt(10)
        ops[5, 1, 0] = ops[5, 2, 0] = -1
        ops[5, 3, 1] = ops[5, 3, 2] = 1
        ops[5] *= np.sqrt(3 / 20)
        ops[6, 0, 1] = ops[6, 0, 2] = -1
        ops[6, 1, 3] = ops[6, 2, 3] = 1
        ops[6] *= np.sqrt(3 / 20)
        ops[7, 0, 3] = np.sqrt(3 / 5)
        ops[8, 3, 0] = np.sqrt(3 / 5)
        return ops.astype(complex)
    if scenario is Scenario.FULL_IND:
        a1 = np.diag([1.0, -1.0, -1.0, 1.0]) / 3
        a2 = np.zeros((4, 4))
        a2[1, 0], a2[3, 2] = -np.sqrt(2) / 3, np.sqrt(2) / 3
        a3 = np.zeros((4, 4))
        a3[2, 0], a3[3, 1] = -np.sqrt(2) / 3, np.sqrt(2) / 3
        a4 = np.zeros((4, 4))
        a4[3, 0] = 2 / 3
        a5 = np.zeros((4, 4))
        a5[2, 1] = 2 / 3
        # remaining four are adjoints: A6=A2', A7=A3', A8=A5', A9=A4'
        return np.array([a1, a2, a3, a4, a5, a2.T, a3.T, a5.T, a4.T]).astype(complex)
    raise ValueError(f"no published Kraus family for {scenario.value}")


def published_ppt_interval(refine: float = 1e-10) -> tuple[float, float]:
    """d011 window where the free-parameter family stays PPT on Bob's side."""

    def margin(d):
        return check_ppt(choi_from_kraus(published_kraus(Scenario.FULL_SIM, d)))

    grid = np.linspace(0.0, 1.0, 201)
    inside = [d for d in grid if margin(d) >= -1e-11]
    if not inside:
        raise RuntimeError("no PPT point found on the d011 scan")

    def bisect(lo, hi, want_inside_hi):
        # invariant: exactly one endpoint has margin >= 0
        while hi - lo > refine:
            mid = 0.5 * (lo + hi)
            if (margin(mid) >= -1e-11) == want_inside_hi:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    left = bisect(max(0.0, inside[0] - 0.005), inside[0], True) if inside[0] > 0 else 0.0
    right = bisect(inside[-1], min(1.0, inside[-1] + 0.005), False) if inside[-1] < 1 else 1.0
    return left, right


# -------------------------------------------------- 14-operator block form

APPENDIX_LABELS = ("s_11", "s_44", "s_41_re", "a_11", "a_44", "a_41_re", "s_22", "s_33")


def appendix_kraus(params) -> np.ndarray:
    """Fourteen Kraus operators from the eight exchange-protocol block values.

    ``params`` maps the labels in :data:`APPENDIX_LABELS` to reals.  The two
    2x2 blocks [[x_11, x_41], [x_41, x_44]] are eigendecomposed (weight =
    eigenvalue, direction = eigenvector), which reproduces the printed
    closed forms when x_41 != 0 and stays finite in the degenerate limit.
    The triplet sector contributes three operators per weight, the singlet
    one, for 3+3+1+1+3+3 = 14.
    """
    p = {k: float(params[k]) for k in APPENDIX_LABELS}
    sh = scenario_similarity(Scenario.PROTOCOL).conj().T
    e4 = np.eye(4)
    r2 = 1 / np.sqrt(2)
    triplet = [e4[0], r2 * (e4[1] + e4[2]), e4[3]]
    singlet = [r2 * (e4[1] - e4[2])]

    def emit(weight, copy_coeffs, sector_vecs):
        if weight < -1e-8:
            raise ValueError(f"block eigenvalue {weight:.3e} is negative")
        w = np.sqrt(max(weight, 0.0))
        out = []
        for vec in sector_vecs:
            u = copy_coeffs[0] * kron(e4[0], vec) + copy_coeffs[1] * kron(e4[3], vec)
            out.append(w * (sh @ u).reshape(4, 4))
        return out

    ops = []
    for prefix, vecs in (("s", triplet), ("a", singlet)):
        block = np.array(
            [
                [p[f"{prefix}_11"], p[f"{prefix}_41_re"]],
                [p[f"{prefix}_41_re"], p[f"{prefix}_44"]],
            ]
        )
        w, v = np.linalg.eigh(block)
        for lam, col in zip(w[::-1], v.T[::-1]):  # larger weight first
            ops += emit(lam, col, vecs)
    for label, copy in (("s_22", 1), ("s_33", 2)):
        if p[label] < -1e-8:
            raise ValueError(f"{label} = {p[label]:.3e} is negative")
        w = np.sqrt(max(p[label], 0.0))
        for vec in triplet:
            u = kron(e4[copy], vec)
            ops.append(w * (sh @ u).reshape(4, 4))
    return np.array(ops)


def harvest_appendix_params(x) -> dict[str, float]:
    """Read the eight block values off an exchange-protocol coefficient vector."""
    ansatz = covariant_ansatz(Scenario.PROTOCOL)
    x = np.asarray(x, float)
    return {lab: float(x[ansatz.index(lab)]) for lab in APPENDIX_LABELS}


# -------------------------------------------------------- fidelity surfaces

CSV_HEADER = "scenario,a,c,ppt,fidelity,fidelity_noppt,analytic,gap,identity_optimal"


@dataclass(frozen=True)
class SurfacePoint:
    a: float
    c: float | None
    fidelity: float
    fidelity_noppt: float
    analytic: float | None
    gap: float
    identity_optimal: bool


@dataclass(frozen=True)
class FidelitySurface:
    scenario: Scenario
    ppt: bool
    points: tuple[SurfacePoint, ...]

    def to_csv(self) -> str:
        def num(v):
            return "" if v is None else f"{v:.12g}"

        def flag(v):
            return "true" if v else "false"

        lines = [CSV_HEADER]
        for p in self.points:
            lines.append(
                ",".join(
                    [
                        self.scenario.value,
                        num(p.a),
                        num(p.c),
                        flag(self.ppt),
                        num(p.fidelity),
                        num(p.fidelity_noppt),
                        num(p.analytic),
                        num(p.gap),
                        flag(p.identity_optimal),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def identity_optimal_flag(scenario: Scenario, a: float, c: float | None, fidelity: float) -> bool:
    # the do-nothing channel commutes with V o V but not with the exchange group
    if scenario is Scenario.PROTOCOL:
        return False
    ident = channel_fidelity(plus_operator(), SchmidtState(a), SchmidtState(c))
    return bool(ident >= fidelity - 1e-6)


def solve_surface_point(scenario, a, c, ppt, tol=1e-8) -> SurfacePoint:
    """One sweep entry: main solve, free-of-PPT rerun, analytic reference.

    Both reported values are feasible-ascent lower bounds, so running the
    unrestricted solve at 1e-9 or better keeps fidelity <= fidelity_noppt
    + 1e-9 even though the two programs converge independently.
    """
    scenario = Scenario(scenario)
    fid, _, sol = solve_point(scenario, a, c, ppt=ppt, tol=tol)
    if ppt:
        fid_free, _, _ = solve_point(scenario, a, c, ppt=False, tol=min(tol, 1e-9))
    else:
        fid_free = fid
    return SurfacePoint(
        a=a,
        c=None if scenario is Scenario.PROTOCOL else c,
        fidelity=fid,
        fidelity_noppt=fid_free,
        analytic=analytic_fidelity(scenario, a, c),
        gap=sol.gap,
        identity_optimal=identity_optimal_flag(scenario, a, c, fid),
    )


def _surface_task(args) -> SurfacePoint:
    # top-level so worker pools can pickle it
    return solve_surface_point(*args)


def grid_sweep(
    scenario: Scenario,
    grid_n: int,
    ppt: bool = True,
    tol: float = 1e-8,
    pool_map=None,
) -> FidelitySurface:
    """Fidelity surface on a uniform grid (a-only for the exchange protocol).

    ``pool_map`` may supply an order-preserving parallel map (for example
    ``ProcessPoolExecutor.map``); the default runs in-process.
    """
    scenario = Scenario(scenario)
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_n)
    if scenario is Scenario.PROTOCOL:
        tasks = [(scenario.value, a, None, ppt, tol) for a in grid]
    else:
        tasks = [(scenario.value, a, c, ppt, tol) for a in grid for c in grid]
    mapper = pool_map if pool_map is not None else map
    points = tuple(mapper(_surface_task, tasks))
    return FidelitySurface(scenario, ppt, points)


@dataclass(frozen=True)
class IdentityRegion:
    grid: np.ndarray   # shared axis for a (rows) and c (columns)
    flags: np.ndarray  # (n, n) bool: do-nothing channel already optimal?


def identity_region(grid_n: int = 51, tol: float = 1e-8) -> IdentityRegion:
    """Map of points where the identity channel matches the PPT optimum."""
    grid = np.linspace(0.0, 1.0, grid_n)
    flags = np.zeros((grid_n, grid_n), dtype=bool)
    for i, a in enumerate(grid):
        for j, c in enumerate(grid):
            fid, _, _ = solve_point(Scenario.SEMICOV, a, c, ppt=True, tol=tol)
            flags[i, j] = identity_optimal_flag(Scenario.SEMICOV, a, c, fid)
    return IdentityRegion(grid, flags)
