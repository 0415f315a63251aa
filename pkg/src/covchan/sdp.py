"""Self-contained semidefinite-programming solver for small block problems.

Solves   maximize  c.x   subject to   A x = b,   C_p + sum_k x_k B_pk >= 0
for a handful of Hermitian pencils of modest size (here 16x16, <= 33 real
parameters).  Equalities are eliminated by a null-space parameterization; the
cone problem is then driven to optimality by a feasible-start primal-dual
interior-point iteration with Nesterov-Todd scaling.  A built-in phase-1
problem (maximize the smallest pencil margin) supplies a strictly feasible
start when the caller cannot.

Everything is deterministic; no external optimization packages are used.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Pencil",
    "SdpProblem",
    "SdpSolution",
    "PencilResiduals",
    "solve",
    "residuals",
    "export_json",
]

_HERM_TOL = 1e-9


@dataclass(frozen=True)
class Pencil:
    """Affine matrix family constant + sum_k x_k mats[k], required PSD."""

    name: str
    constant: np.ndarray  # (n, n) Hermitian
    mats: np.ndarray      # (m, n, n) Hermitian

    def __post_init__(self):
        n = self.constant.shape[0]
        if self.constant.shape != (n, n) or self.mats.shape[1:] != (n, n):
            raise ValueError("pencil matrices must be square and consistent")
        stack = np.concatenate([self.constant[None], self.mats])
        dev = np.abs(stack - np.conj(np.swapaxes(stack, 1, 2))).max()
        if dev > _HERM_TOL:
            raise ValueError(f"pencil {self.name!r} is not Hermitian (dev {dev:.2e})")


@dataclass(frozen=True)
class SdpProblem:
    """Objective, pencils, and equality rows over one real parameter vector."""

    objective: np.ndarray          # (m,)
    pencils: tuple[Pencil, ...]
    eq_rows: np.ndarray            # (r, m), possibly redundant
    eq_rhs: np.ndarray             # (r,)
    labels: tuple[str, ...] = ()
    name: str = "sdp"

    def __post_init__(self):
        m = len(self.objective)
        if self.labels and len(self.labels) != m:
            raise ValueError("labels length must match objective length")
        if self.eq_rows.size and self.eq_rows.shape[1] != m:
            raise ValueError("equality rows must match objective length")
        for p in self.pencils:
            if p.mats.shape[0] != m:
                raise ValueError(f"pencil {p.name!r} has wrong parameter count")


@dataclass
class SdpSolution:
    x: np.ndarray
    objective: float
    status: str                    # optimal | infeasible | max-iterations
    gap: float
    iterations: int
    eq_residual: float
    effective_rank: int = 0
    message: str = ""


@dataclass(frozen=True)
class PencilResiduals:
    min_eigs: tuple[float, ...]
    eq_residual: float


def residuals(problem: SdpProblem, x: np.ndarray) -> PencilResiduals:
    """Exact feasibility report for a candidate parameter vector."""
    mins = []
    for p in problem.pencils:
        s = p.constant + np.einsum("k,kij->ij", x, p.mats)
        mins.append(float(np.linalg.eigvalsh(s)[0]))
    if problem.eq_rows.size:
        eq = float(np.abs(problem.eq_rows @ x - problem.eq_rhs).max())
    else:
        eq = 0.0
    return PencilResiduals(tuple(mins), eq)


# ---------------------------------------------------------------- reduction

def _reduce_equalities(problem: SdpProblem):
    """Null-space parameterization x = x0 + N y of the equality system."""
    m = len(problem.objective)
    a, b = problem.eq_rows, problem.eq_rhs
    if not a.size:
        return np.zeros(m), np.eye(m), 0, 0.0
    u, sv, vt = np.linalg.svd(a, full_matrices=True)
    rank = int((sv > max(a.shape) * np.finfo(float).eps * max(sv[0], 1)).sum())
    x0 = vt[:rank].T @ ((u.T[:rank] @ b) / sv[:rank])
    nullb = vt[rank:].T
    resid = float(np.abs(a @ x0 - b).max()) if rank else float(np.abs(b).max())
    return x0, nullb, rank, resid


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _psd_funcs(mat: np.ndarray):
    """(eigvals, eigvecs) with eigenvalues clipped away from zero."""
    w, v = np.linalg.eigh(mat)
    w = np.maximum(w, 1e-300)
    return w, v


def _apply_spectral(w, v, power):
    return (v * np.power(w, power)) @ v.conj().T


def _max_step(ihalf, delta) -> float:
    """Largest t with X + t*delta > 0, given X^(-1/2)."""
    g = _herm(ihalf @ delta @ ihalf)
    lam = np.linalg.eigvalsh(g)[0]
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _solve_sym(h: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(h, rhs)
    except np.linalg.LinAlgError:
        ridge = 1e-12 * max(np.trace(h).real / max(len(h), 1), 1e-30)
        try:
            return np.linalg.solve(h + ridge * np.eye(len(h)), rhs)
        except np.linalg.LinAlgError:
            return np.linalg.lstsq(h, rhs, rcond=None)[0]


def _ipm(b, pencils, y0, tol, max_iter, stop_when=None):
    """Feasible-start NT primal-dual iteration on  max b.y, F0_p + sum y_i F_pi >= 0.

    ``pencils`` is a list of (F0, Fs); returns (y, status, gap, iters, rd_norm).
    """
    q = len(b)
    y = np.asarray(y0, float).copy()
    ns = [p[0].shape[0] for p in pencils]
    # flattened copies: Tr[F_k X] for all k at once is one matrix-vector product
    raw = [p[1].reshape(q, -1) for p in pencils]
    flats = [f.conj() for f in raw]
    zs = [np.eye(n, dtype=complex) for n in ns]
    nu = sum(ns)
    stalls = 0
    gap = np.inf
    rd_norm = np.inf
    for it in range(max_iter):
        ss, eigs = [], []
        ok = True
        for (f0, fs), n, fr in zip(pencils, ns, raw):
            s = _herm(f0 + (y @ fr).reshape(n, n))
            w, v = _psd_funcs(s)
            if w[0] <= 0:
                ok = False
            ss.append(s)
            eigs.append((w, v))
        if not ok:  # pragma: no cover - guarded by the line search
            return y, "max-iterations", gap, it, rd_norm

        gap = sum(np.vdot(s, z).real for s, z in zip(ss, zs))
        rd = b + sum((fc @ z.ravel()).real for fc, z in zip(flats, zs))
        rd_norm = float(np.abs(rd).max()) if q else 0.0
        mu = gap / nu

        if gap <= tol and rd_norm <= max(tol, 1e-9):
            return y, "optimal", gap, it, rd_norm
        if stop_when is not None and stop_when(y):
            return y, "early-stop", gap, it, rd_norm

        # NT scaling and Schur complement
        h = np.zeros((q, q))
        h_rhs = np.zeros(q)
        sinvs, winvs, sihalfs, zihalfs = [], [], [], []
        for (f0, fs), z, fc, (w, v) in zip(pencils, zs, flats, eigs):
            sinv = _apply_spectral(w, v, -1.0)
            shalf = _apply_spectral(w, v, 0.5)
            sihalf = _apply_spectral(w, v, -0.5)
            wm, vm = _psd_funcs(_herm(shalf @ z @ shalf))
            winv = _herm(sihalf @ _apply_spectral(wm, vm, 0.5) @ sihalf)
            wz, vz = _psd_funcs(z)
            t = winv @ fs @ winv
            h += (fc @ t.reshape(q, -1).T).real
            h_rhs += (fc @ sinv.ravel()).real
            sinvs.append(sinv)
            winvs.append(winv)
            sihalfs.append(sihalf)
            zihalfs.append(_apply_spectral(wz, vz, -0.5))
        h = 0.5 * (h + h.T)

        def directions(sigma_mu):
            dy = _solve_sym(h, b + sigma_mu * h_rhs)
            dss, dzs = [], []
            for z, fr, sinv, winv, n in zip(zs, raw, sinvs, winvs, ns):
                ds = (dy @ fr).reshape(n, n)
                dz = _herm(sigma_mu * sinv - z - winv @ ds @ winv)
                dss.append(ds)
                dzs.append(dz)
            return dy, dss, dzs

        def step_lengths(dss, dzs):
            a = d = 1.0
            for sih, zih, ds, dz in zip(sihalfs, zihalfs, dss, dzs):
                a = min(a, 0.98 * _max_step(sih, ds))
                d = min(d, 0.98 * _max_step(zih, dz))
            return a, d

        # predictor: pure affine step fixes the centering weight
        dy_a, dss_a, dzs_a = directions(0.0)
        a_aff, d_aff = step_lengths(dss_a, dzs_a)
        alpha_a = min(a_aff, d_aff)
        gap_a = sum(
            np.vdot(s + alpha_a * ds, z + alpha_a * dz).real
            for s, ds, z, dz in zip(ss, dss_a, zs, dzs_a)
        )
        sigma = float(np.clip((max(gap_a, 0.0) / gap) ** 3, 1e-6, 0.99))

        dy, dss, dzs = directions(sigma * mu)
        alpha, beta = step_lengths(dss, dzs)

        y = y + alpha * dy
        zs = [_herm(z + beta * dz) for z, dz in zip(zs, dzs)]

        if max(alpha, beta) < 1e-8:
            stalls += 1
            if stalls >= 3:
                return y, "max-iterations", gap, it + 1, rd_norm
        else:
            stalls = 0
        if abs(b @ y) > 1e12:
            return y, "max-iterations", gap, it + 1, rd_norm
    return y, "max-iterations", gap, max_iter, rd_norm


def _phase1(pencils, tol, max_iter):
    """Strictly feasible y via  max t  s.t.  F_p(y) - t I >= 0,  t <= 1."""
    q = len(pencils[0][1])
    margins = [np.linalg.eigvalsh(f0)[0] for f0, _ in pencils]
    t0 = min(0.0, min(margins) - 1.0)
    ext = []
    for f0, fs in pencils:
        n = f0.shape[0]
        eye_col = -np.eye(n, dtype=complex)[None]
        ext.append((f0.astype(complex), np.concatenate([fs, eye_col])))
    cap0 = np.array([[1.0 + 0j]])
    cap_mats = np.zeros((q + 1, 1, 1), complex)
    cap_mats[q, 0, 0] = -1.0
    ext.append((cap0, cap_mats))
    b = np.zeros(q + 1)
    b[q] = 1.0
    y0 = np.zeros(q + 1)
    y0[q] = t0
    y, status, gap, iters, _ = _ipm(
        b, ext, y0, max(tol, 1e-7), max_iter, stop_when=lambda v: v[q] > 1e-3
    )
    return y[:q], y[q], iters


def solve(
    problem: SdpProblem,
    tol: float = 1e-8,
    max_iter: int = 500,
    initial: np.ndarray | None = None,
) -> SdpSolution:
    """Maximize the objective over the problem's feasible set.

    ``initial`` may supply a parameter vector that already satisfies the
    equalities with every pencil strictly positive; otherwise a phase-1
    problem locates one.  The reported gap certifies the objective to the
    requested tolerance when the status is ``optimal``.
    """
    c = np.asarray(problem.objective, float)
    x0, nullb, rank, eq_resid = _reduce_equalities(problem)
    scale = max(1.0, float(np.abs(problem.eq_rhs).max()) if problem.eq_rhs.size else 0.0)
    if eq_resid > 1e-9 * scale:
        return SdpSolution(
            x=x0, objective=float(c @ x0), status="infeasible", gap=np.inf,
            iterations=0, eq_residual=eq_resid, effective_rank=rank,
            message="equality system inconsistent",
        )

    pencils = []
    for p in problem.pencils:
        f0 = _herm(p.constant.astype(complex) + np.einsum("k,kij->ij", x0, p.mats))
        fs = np.einsum("kij,km->mij", p.mats.astype(complex), nullb)
        pencils.append((f0, fs))
    q = nullb.shape[1]

    if q == 0:
        res = residuals(problem, x0)
        status = "optimal" if min(res.min_eigs, default=0.0) >= -1e-8 else "infeasible"
        return SdpSolution(
            x=x0, objective=float(c @ x0), status=status, gap=0.0, iterations=0,
            eq_residual=res.eq_residual, effective_rank=rank,
            message="equalities pin a unique point",
        )

    iters_used = 0
    y0 = None
    if initial is not None:
        cand = nullb.T @ (np.asarray(initial, float) - x0)
        margins = [
            np.linalg.eigvalsh(f0 + np.einsum("k,kij->ij", cand, fs))[0]
            for f0, fs in pencils
        ]
        if min(margins) > 1e-8:
            y0 = cand
    if y0 is None:
        margins = [np.linalg.eigvalsh(f0)[0] for f0, _ in pencils]
        if min(margins) > 1e-8:
            y0 = np.zeros(q)
    if y0 is None:
        y0, t_star, it1 = _phase1(pencils, tol, max_iter)
        iters_used += it1
        if t_star <= 1e-9:
            return SdpSolution(
                x=x0 + nullb @ y0, objective=float(c @ (x0 + nullb @ y0)),
                status="infeasible", gap=np.inf, iterations=iters_used,
                eq_residual=eq_resid, effective_rank=rank,
                message=f"no strictly feasible point (margin {t_star:.2e})",
            )

    b = nullb.T @ c
    y, status, gap, iters, rd = _ipm(b, pencils, y0, tol, max_iter)
    iters_used += iters
    x = x0 + nullb @ y
    return SdpSolution(
        x=x,
        objective=float(c @ x),
        status="optimal" if status == "optimal" else "max-iterations",
        gap=float(gap),
        iterations=iters_used,
        eq_residual=float(np.abs(problem.eq_rows @ x - problem.eq_rhs).max())
        if problem.eq_rows.size
        else 0.0,
        effective_rank=rank,
        message=f"dual residual {rd:.2e}",
    )


# ------------------------------------------------------------------ export

def _complex_matrix(m: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, complex)]


def export_json(problem: SdpProblem) -> str:
    """Byte-stable JSON form of the problem (matrices as [re, im] pairs)."""
    doc = {
        "id": problem.name,
        "labels": list(problem.labels),
        "objective": [float(v) for v in problem.objective],
        "pencils": [
            {
                "name": p.name,
                "constant": _complex_matrix(p.constant),
                "mats": [_complex_matrix(m) for m in p.mats],
            }
            for p in problem.pencils
        ],
        "equalities": {
            "rows": [[float(v) for v in row] for row in problem.eq_rows],
            "rhs": [float(v) for v in problem.eq_rhs],
        },
        "expected_fidelity": None,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))
