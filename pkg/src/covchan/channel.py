"""Two-qubit pure states, channel (Choi) operators, Kraus forms, and fidelity.

A channel M on two qubits is represented by the operator R = (M o 1)(P+)
acting on (out) o (in), with P+ the unnormalized maximally entangled
operator of trace 4.  Qubit order inside each 16-dimensional operator is
(A_out, B_out, A_in, B_in), most significant first.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import eig_hermitian, partial_trace, partial_transpose

DIM = 4  # two qubits on each side of the channel

__all__ = [
    "DIM",
    "NotCompletelyPositiveError",
    "SchmidtState",
    "plus_operator",
    "apply_channel",
    "choi_from_kraus",
    "kraus_from_choi",
    "check_tp",
    "check_ppt",
    "channel_fidelity",
]


class NotCompletelyPositiveError(ValueError):
    """A claimed Choi operator has a significantly negative eigenvalue."""


@dataclass(frozen=True)
class SchmidtState:
    """Pure two-qubit state a|00> + sqrt(1-a^2)|11> with Schmidt weight a."""

    schmidt: float

    def __post_init__(self):
        if not 0.0 <= self.schmidt <= 1.0:
            raise ValueError(f"schmidt weight must lie in [0, 1], got {self.schmidt}")

    @property
    def vector(self) -> np.ndarray:
        a = float(self.schmidt)
        return np.array([a, 0.0, 0.0, np.sqrt(1.0 - a * a)])

    @property
    def density(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v)


def _density(state) -> np.ndarray:
    if isinstance(state, SchmidtState):
        return state.density
    arr = np.asarray(state)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return arr


def plus_operator(d: int = DIM) -> np.ndarray:
    """Unnormalized maximally entangled operator sum_ij |ii><jj| (trace d)."""
    v = np.zeros(d * d)
    v[:: d + 1] = 1.0
    return np.outer(v, v).astype(complex)


def apply_channel(choi: np.ndarray, rho) -> np.ndarray:
    """Send a state through the channel: Tr_in[(1 o rho^T) R]."""
    rho = _density(rho)
    r4 = np.asarray(choi).reshape(DIM, DIM, DIM, DIM)
    return np.einsum("ki,okpi->op", rho, r4)


def choi_from_kraus(ops) -> np.ndarray:
    """Assemble R = sum_i (A_i o 1) P+ (A_i o 1)^dag from 4x4 Kraus operators."""
    r = np.zeros((DIM * DIM, DIM * DIM), complex)
    for a in ops:
        a = np.asarray(a, complex)
        if a.shape != (DIM, DIM):
            raise ValueError(f"Kraus operator must be {DIM}x{DIM}, got {a.shape}")
        v = a.reshape(DIM * DIM)
        r += np.outer(v, v.conj())
    return r


def kraus_from_choi(choi: np.ndarray, cutoff: float = 1e-10) -> list[np.ndarray]:
    """Extract Kraus operators from a Choi operator by eigendecomposition.

    Eigenvalues above ``cutoff`` (relative to the largest) each contribute one
    operator sqrt(lam) * reshape(vec).  A negative eigenvalue below -1e-8
    raises :class:`NotCompletelyPositiveError`.
    """
    w, v = eig_hermitian(choi)
    if w[0] < -1e-8:
        raise NotCompletelyPositiveError(f"Choi operator has eigenvalue {w[0]:.3e}")
    scale = max(w[-1], 0.0)
    ops = []
    for lam, vec in zip(w, v.T):
        if lam > cutoff * scale:
            ops.append(np.sqrt(lam) * vec.reshape(DIM, DIM))
    return ops


def check_tp(choi: np.ndarray) -> float:
    """Max-abs deviation of Tr_out R from the identity on the input space."""
    t = partial_trace(choi, [DIM, DIM], keep=[1])
    return float(np.abs(t - np.eye(DIM)).max())


def check_ppt(choi: np.ndarray) -> float:
    """Smallest eigenvalue after transposing Bob's factors (B_out, B_in)."""
    pt = partial_transpose(choi, [2, 2, 2, 2], transposed=[1, 3])
    w, _ = eig_hermitian(pt)
    return float(w[0])


def channel_fidelity(choi: np.ndarray, input_state, target_state) -> float:
    """Overlap of the channel output with the target: Tr[(rho_t o rho_in^T) R].

    Exactly linear in the Choi operator; accepts :class:`SchmidtState`,
    4-vectors, or 4x4 densities.
    """
    w = np.kron(_density(target_state), _density(input_state).T)
    return float(np.einsum("ij,ji->", w, np.asarray(choi)).real)
