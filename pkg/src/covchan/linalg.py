"""Dense complex linear-algebra primitives for small multi-qubit operators."""
from __future__ import annotations

from functools import reduce

import numpy as np

__all__ = [
    "kron",
    "partial_trace",
    "partial_transpose",
    "eig_hermitian",
    "haar_su2",
]


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of the given matrices or vectors, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, ops)


def _to_tensor(op: np.ndarray, dims: list[int]) -> np.ndarray:
    op = np.asarray(op)
    d = int(np.prod(dims))
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match dims {dims}")
    return op.reshape(dims + dims)


def partial_trace(op: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out every tensor factor whose index is not in ``keep``.

    ``dims`` lists the factor dimensions in tensor order; ``keep`` holds the
    0-based factor indices that survive.
    """
    dims = list(dims)
    keep = sorted(set(keep))
    if any(k not in range(len(dims)) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    t = _to_tensor(op, dims)
    remaining = list(range(len(dims)))
    while len(remaining) > len(keep):
        pos = next(i for i, f in enumerate(remaining) if f not in keep)
        t = np.trace(t, axis1=pos, axis2=pos + len(remaining))
        remaining.pop(pos)
    d = int(np.prod([dims[f] for f in remaining])) if remaining else 1
    return t.reshape(d, d)


def partial_transpose(op: np.ndarray, dims, transposed) -> np.ndarray:
    """Transpose the factors listed in ``transposed`` (0-based, tensor order)."""
    dims = list(dims)
    transposed = set(transposed)
    if any(k not in range(len(dims)) for k in transposed):
        raise ValueError(f"transposed indices {sorted(transposed)} out of range")
    t = _to_tensor(op, dims)
    n = len(dims)
    for i in transposed:
        t = np.swapaxes(t, i, i + n)
    d = int(np.prod(dims))
    return t.reshape(d, d)


def eig_hermitian(op: np.ndarray, tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Rejects inputs whose anti-Hermitian part exceeds ``tol`` so silent phase
    errors upstream cannot masquerade as valid spectra.
    """
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {op.shape}")
    dev = np.abs(op - op.conj().T).max()
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e} > {tol:.1e})")
    return np.linalg.eigh(op)


def haar_su2(seed) -> np.ndarray:
    """Haar-distributed SU(2) element, deterministic for an integer seed.

    ``seed`` may also be a ``numpy.random.Generator`` for caller-owned streams.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))  # phase fix -> Haar on U(2)
    return q / np.sqrt(np.linalg.det(q))
