import numpy as np
import pytest

from covchan.channel import (
    DIM,
    NotCompletelyPositiveError,
    SchmidtState,
    apply_channel,
    channel_fidelity,
    check_ppt,
    check_tp,
    choi_from_kraus,
    kraus_from_choi,
    plus_operator,
)

rng = np.random.default_rng(5)


def random_kraus_channel(n_ops=3):
    """Random CPTP map on two qubits via a normalized Kraus family."""
    ops = rng.normal(size=(n_ops, DIM, DIM)) + 1j * rng.normal(size=(n_ops, DIM, DIM))
    gram = sum(a.conj().T @ a for a in ops)
    w, v = np.linalg.eigh(gram)
    fix = v @ np.diag(w**-0.5) @ v.conj().T
    return [a @ fix for a in ops]


def test_schmidt_state_vector_and_density():
    s = SchmidtState(0.6)
    np.testing.assert_allclose(s.vector, [0.6, 0, 0, 0.8])
    np.testing.assert_allclose(s.density, np.outer(s.vector, s.vector))
    assert abs(np.trace(s.density) - 1) < 1e-15


@pytest.mark.parametrize("bad", [-0.1, 1.1, 2.0])
def test_schmidt_state_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        SchmidtState(bad)


def test_plus_operator_is_identity_choi():
    p = plus_operator()
    assert abs(np.trace(p) - DIM) < 1e-12
    rho = SchmidtState(0.37).density
    np.testing.assert_allclose(apply_channel(p, rho), rho, atol=1e-12)


def test_identity_choi_is_tp_and_ppt():
    p = plus_operator()
    assert check_tp(p) < 1e-12
    # product structure across the A|B cut keeps the partial transpose PSD
    assert check_ppt(p) > -1e-12


def test_choi_kraus_round_trip():
    ops = random_kraus_channel()
    choi = choi_from_kraus(ops)
    assert check_tp(choi) < 1e-12
    back = choi_from_kraus(kraus_from_choi(choi))
    np.testing.assert_allclose(back, choi, atol=1e-10)


def test_apply_channel_matches_kraus_action():
    ops = random_kraus_channel()
    choi = choi_from_kraus(ops)
    rho = SchmidtState(0.8).density
    direct = sum(a @ rho @ a.conj().T for a in ops)
    np.testing.assert_allclose(apply_channel(choi, rho), direct, atol=1e-12)


def test_kraus_from_choi_rejects_negative_operator():
    bad = -np.eye(16, dtype=complex)
    with pytest.raises(NotCompletelyPositiveError):
        kraus_from_choi(bad)


def test_choi_from_kraus_rejects_wrong_shape():
    with pytest.raises(ValueError):
        choi_from_kraus([np.eye(3)])


def test_channel_fidelity_identity_is_overlap():
    src, tgt = SchmidtState(0.3), SchmidtState(0.8)
    overlap = abs(src.vector @ tgt.vector) ** 2
    assert channel_fidelity(plus_operator(), src, tgt) == pytest.approx(overlap, abs=1e-12)


def test_channel_fidelity_accepts_raw_vectors():
    v = np.array([1.0, 0, 0, 0])
    assert channel_fidelity(plus_operator(), v, v) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_of_random_channel_stays_in_unit_interval():
    choi = choi_from_kraus(random_kraus_channel())
    for a, c in [(0.0, 1.0), (0.25, 0.5), (1.0, 1.0)]:
        f = channel_fidelity(choi, SchmidtState(a), SchmidtState(c))
        assert -1e-12 <= f <= 1 + 1e-12
