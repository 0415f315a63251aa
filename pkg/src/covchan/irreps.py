"""Symmetry machinery: SU(2) irrep blocks, similarity frames, covariant ansatz.

Each covariance scenario demands [R, g(U)] = 0 for a family of group elements
g(U) acting on the four qubits (A_out, B_out, A_in, B_in).  A fixed unitary S
moves R into a canonical frame where g becomes a plain tensor power of U and
the commutant is a direct sum of small blocks; the ansatz returned here is the
Hermitian basis of that commutant, transported back to the original frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .linalg import haar_su2, kron

__all__ = [
    "Scenario",
    "PAULI_Y",
    "SWAP",
    "two_qubit_projectors",
    "IrrepBlock",
    "IrrepBasis",
    "table1_basis",
    "isomorphism_operator",
    "scenario_similarity",
    "group_element",
    "rotation_pair",
    "CovariantAnsatz",
    "covariant_ansatz",
    "commutant_dimension",
]

PAULI_Y = np.array([[0, -1j], [1j, 0]])
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
_I2 = np.eye(2, dtype=complex)


class Scenario(str, Enum):
    """The four covariance groups, keyed by their CLI tags."""

    SEMICOV = "semicov"          # V1 = V2 = 1 o U
    FULL_SIM = "full-sim"        # V1 = V2 = U o U
    FULL_IND = "full-ind"        # V1 = V2 = U1 o U2
    PROTOCOL = "protocol"        # V1 = U o 1, V2 = 1 o U  (state exchange)

    @classmethod
    def from_tag(cls, tag: str) -> "Scenario":
        try:
            return cls(tag)
        except ValueError:
            raise ValueError(
                f"unknown scenario {tag!r}; expected one of "
                + ", ".join(s.value for s in cls)
            ) from None


def two_qubit_projectors():
    """Projectors onto the triplet (symmetric) and singlet subspaces of C2 o C2."""
    singlet = np.zeros(4)
    singlet[1], singlet[2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    p_anti = np.outer(singlet, singlet).astype(complex)
    return np.eye(4, dtype=complex) - p_anti, p_anti


@dataclass(frozen=True)
class IrrepBlock:
    """One multiplicity copy of spin-j inside the four-qubit product rep."""

    j: int
    copy: int
    vectors: np.ndarray  # (2j+1, 16), rows ordered by descending magnetic number

    def __post_init__(self):
        if self.vectors.shape != (2 * self.j + 1, 16):
            raise ValueError("block vector shape does not match 2j+1")


@dataclass(frozen=True)
class IrrepBasis:
    blocks: tuple[IrrepBlock, ...]

    def block(self, j: int, copy: int) -> IrrepBlock:
        for b in self.blocks:
            if b.j == j and b.copy == copy:
                return b
        raise KeyError(f"no block j={j} copy={copy}")

    @property
    def matrix(self) -> np.ndarray:
        """All 16 basis vectors stacked as rows."""
        return np.vstack([b.vectors for b in self.blocks])


@lru_cache(maxsize=None)
def table1_basis() -> IrrepBasis:
    """Adapted orthonormal basis for the U o U o U o U decomposition.

    Spin content 2x j=0, 3x j=1, 1x j=2; the rows of every copy of a given j
    are aligned so that sum_m |j,k,m><j,l,m| commutes with the group action.
    """
    e = np.eye(4)
    v00, v01, v10, v11 = e
    sp = v01 + v10  # unnormalized |01>+|10>
    sm = v01 - v10  # unnormalized |01>-|10>

    def block(j, copy, rows):
        return IrrepBlock(j, copy, np.array(rows))

    b0_1 = block(0, 1, [0.5 * kron(sm, sm)])
    b0_2 = block(0, 2, [(kron(v00, v11) - 0.5 * kron(sp, sp) + kron(v11, v00)) / np.sqrt(3)])
    r2 = 1 / np.sqrt(2)
    b1_1 = block(1, 1, [r2 * kron(sm, v00), 0.5 * kron(sm, sp), r2 * kron(sm, v11)])
    b1_2 = block(1, 2, [r2 * kron(v00, sm), 0.5 * kron(sp, sm), r2 * kron(v11, sm)])
    b1_3 = block(
        1,
        3,
        [
            -0.5 * (kron(v00, sp) - kron(sp, v00)),
            -r2 * (kron(v00, v11) - kron(v11, v00)),
            -0.5 * (kron(sp, v11) - kron(v11, sp)),
        ],
    )
    b2_1 = block(
        2,
        1,
        [
            kron(v00, v00),
            0.5 * (kron(v00, sp) + kron(sp, v00)),
            (kron(v00, v11) + kron(v11, v00) + kron(sp, sp)) / np.sqrt(6),
            0.5 * (kron(sp, v11) + kron(v11, sp)),
            kron(v11, v11),
        ],
    )
    return IrrepBasis((b0_1, b0_2, b1_1, b1_2, b1_3, b2_1))


def isomorphism_operator(basis: IrrepBasis, j: int, k: int, l: int) -> np.ndarray:
    """Partial isometry sum_m |j,k,m><j,l,m| between two copies of spin j."""
    vk = basis.block(j, k).vectors
    vl = basis.block(j, l).vectors
    return np.einsum("mi,mj->ij", vk, vl.conj()).astype(complex)


def scenario_similarity(scenario: Scenario) -> np.ndarray:
    """Unitary S with R_canonical = S R S^dag for the scenario's covariance group."""
    scenario = Scenario(scenario)
    swap23 = kron(_I2, SWAP, _I2)
    if scenario is Scenario.SEMICOV:
        return kron(_I2, SWAP, PAULI_Y)
    if scenario is Scenario.FULL_SIM:
        return kron(_I2, _I2, PAULI_Y, PAULI_Y)
    if scenario is Scenario.FULL_IND:
        return kron(_I2, PAULI_Y, _I2, PAULI_Y) @ swap23
    if scenario is Scenario.PROTOCOL:
        return kron(_I2, SWAP, PAULI_Y) @ kron(_I2, _I2, SWAP)
    raise ValueError(scenario)


def group_element(scenario: Scenario, u: np.ndarray, u2: np.ndarray | None = None) -> np.ndarray:
    """Covariance group element V2 o V1* on the four qubits for an SU(2) sample."""
    scenario = Scenario(scenario)
    if scenario is Scenario.SEMICOV:
        return kron(_I2, u, _I2, u.conj())
    if scenario is Scenario.FULL_SIM:
        return kron(u, u, u.conj(), u.conj())
    if scenario is Scenario.FULL_IND:
        if u2 is None:
            raise ValueError("full-ind needs two independent SU(2) samples")
        return kron(u, u2, u.conj(), u2.conj())
    if scenario is Scenario.PROTOCOL:
        return kron(_I2, u, u.conj(), _I2)
    raise ValueError(scenario)


def rotation_pair(scenario: Scenario, u: np.ndarray, u2: np.ndarray | None = None):
    """The unitaries (V1, V2) rotating the input and target states."""
    scenario = Scenario(scenario)
    if scenario is Scenario.SEMICOV:
        v = kron(_I2, u)
        return v, v
    if scenario is Scenario.FULL_SIM:
        v = kron(u, u)
        return v, v
    if scenario is Scenario.FULL_IND:
        if u2 is None:
            raise ValueError("full-ind needs two independent SU(2) samples")
        v = kron(u, u2)
        return v, v
    if scenario is Scenario.PROTOCOL:
        return kron(u, _I2), kron(_I2, u)
    raise ValueError(scenario)


@dataclass(frozen=True)
class CovariantAnsatz:
    """Hermitian basis of the scenario's commutant, in the original frame."""

    scenario: Scenario
    labels: tuple[str, ...]
    matrices: np.ndarray  # (m, 16, 16)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


def _hermitian_family(iso, copies, name):
    """All Hermitian basis elements built from copy-to-copy isomorphisms.

    ``iso(k, l)`` maps copy l to copy k; for k > l the real combination
    iso(k,l) + iso(l,k) carries Re of the parameter and i(iso(k,l) - iso(l,k))
    carries Im, matching the conjugate-pair expansion of the block matrix.
    """
    labels, mats = [], []
    for k in copies:
        labels.append(name(k, k))
        mats.append(iso(k, k))
    for a, l in enumerate(copies):
        for k in copies[a + 1 :]:
            p_kl, p_lk = iso(k, l), iso(l, k)
            labels.append(name(k, l) + "_re")
            mats.append(p_kl + p_lk)
            labels.append(name(k, l) + "_im")
            mats.append(1j * (p_kl - p_lk))
    return labels, mats


@lru_cache(maxsize=None)
def covariant_ansatz(scenario: Scenario) -> CovariantAnsatz:
    """Block parameterization of all covariant Choi operators for the scenario."""
    scenario = Scenario(scenario)
    s = scenario_similarity(scenario)
    p_sym, p_anti = two_qubit_projectors()
    labels: list[str] = []
    canonical: list[np.ndarray] = []

    if scenario in (Scenario.SEMICOV, Scenario.PROTOCOL):
        # copies |q1 q2> in {00,01,10,11} -> 1..4, sector = last-pair triplet/singlet
        eye4 = np.eye(4)
        for prefix, sector in (("s", p_sym), ("a", p_anti)):
            def iso(k, l, sector=sector):
                return kron(np.outer(eye4[k - 1], eye4[l - 1]), sector)

            lab, mats = _hermitian_family(iso, [1, 2, 3, 4], lambda k, l, p=prefix: f"{p}_{k}{l}")
            labels += lab
            canonical += mats
    elif scenario is Scenario.FULL_SIM:
        basis = table1_basis()
        copies_of = {0: [1, 2], 1: [1, 2, 3], 2: [1]}
        for j, copies in copies_of.items():
            def iso(k, l, j=j):
                return isomorphism_operator(basis, j, k, l)

            lab, mats = _hermitian_family(iso, copies, lambda k, l, j=j: f"d_{j}{k}{l}")
            labels += lab
            canonical += mats
    elif scenario is Scenario.FULL_IND:
        for label, (left, right) in {
            "p_1": (p_anti, p_anti),
            "p_2": (p_anti, p_sym),
            "p_3": (p_sym, p_anti),
            "p_4": (p_sym, p_sym),
        }.items():
            labels.append(label)
            canonical.append(kron(left, right))
    else:
        raise ValueError(scenario)

    sh = s.conj().T
    matrices = np.array([sh @ b @ s for b in canonical])
    return CovariantAnsatz(scenario, tuple(labels), matrices)


def commutant_dimension(scenario: Scenario, samples: int = 30, seed: int = 0) -> int:
    """Numerically count Hermitian solutions of [X, g(U)] = 0 over Haar samples."""
    scenario = Scenario(scenario)
    herm = []
    for i in range(16):
        m = np.zeros((16, 16), complex)
        m[i, i] = 1
        herm.append(m)
    for i in range(16):
        for j in range(i + 1, 16):
            m = np.zeros((16, 16), complex)
            m[i, j] = m[j, i] = 1
            herm.append(m)
            m = np.zeros((16, 16), complex)
            m[i, j], m[j, i] = -1j, 1j
            herm.append(m)
    herm = np.array(herm)
    rng = np.random.default_rng(seed)
    gram = np.zeros((256, 256))
    for _ in range(samples):
        g = group_element(scenario, haar_su2(rng), haar_su2(rng))
        comm = herm @ g - g @ herm
        jac = comm.reshape(256, -1)
        jac = np.concatenate([jac.real, jac.imag], axis=1)
        gram += jac @ jac.T
    w = np.linalg.eigvalsh(gram)
    return int((w < 1e-9 * w[-1]).sum())
