import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnotlab.gatelib import (
    BELL_KINDS,
    BELL_OUTCOME,
    C12,
    C21,
    H,
    SWAP,
    X,
    Z,
    GateError,
    PhasedCnotParams,
    bell_measure,
    bell_pair,
    cnot,
    conjugate_basis,
    controlled_u,
    is_local_product,
    is_phased_cnot,
    phased_cnot,
    phased_pattern,
    std_gate,
    swap3,
)
from cnotlab.qstate import apply, fidelity, prepare, random_qubit, random_state, random_unitary

S = 1 / np.sqrt(2)
I2 = np.eye(2)
angles = st.floats(-20, 20, allow_nan=False)


def basis(k, n=2):
    v = np.zeros(2**n, dtype=complex)
    v[k] = 1
    return v


def test_cnot_mapping():
    for e1 in (0, 1):
        for e2 in (0, 1):
            col = C12 @ basis(2 * e1 + e2)
            assert np.array_equal(col, basis(2 * e1 + (e1 ^ e2)))
    assert np.array_equal(C21 @ basis(0b01), basis(0b11))
    assert set(np.unique(C12.real)) <= {0, 1}


def test_cnot_errors_and_orientation():
    with pytest.raises(GateError):
        cnot(1, 1)
    assert np.array_equal(cnot(1, 0), C21)


def test_cnot_squared_is_identity():
    assert np.array_equal(C12 @ C12, np.eye(4))
    assert np.array_equal(C21 @ C21, np.eye(4))


def test_std_gates():
    assert np.array_equal(std_gate("X"), [[0, 1], [1, 0]])
    assert np.array_equal(std_gate("Z"), [[1, 0], [0, -1]])
    assert np.allclose(std_gate("H") @ std_gate("H"), I2, atol=1e-15)
    assert np.allclose(Z @ np.array([S, S]), [S, -S])
    with pytest.raises(GateError):
        std_gate("Y")


def test_phased_cnot_examples():
    assert np.array_equal(phased_cnot(PhasedCnotParams(0, 0, 0, 0)), C12)
    u = phased_cnot(PhasedCnotParams(np.pi, 0, 0, 0))
    assert np.allclose(u @ basis(0), -basis(0))
    assert np.allclose(u @ basis(2), basis(3))


@settings(max_examples=100, deadline=None)
@given(angles, angles, angles, angles)
def test_phased_cnot_properties(a, b, c, d):
    p = PhasedCnotParams(a, b, c, d)
    u = phased_cnot(p)
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-10
    assert np.allclose(phased_cnot(p.reduced()), u, atol=1e-12)
    # factorises as D (diagonal in the output basis) times cnot
    D = u @ C12.conj().T
    assert np.max(np.abs(D - np.diag(np.diag(D)))) < 1e-12
    assert is_phased_cnot(np.exp(0.3j) * u)
    r, th = phased_pattern(np.exp(0.3j) * u)
    assert r < 1e-12
    v = phased_cnot(PhasedCnotParams(*th))
    k = np.vdot(v.ravel(), u.ravel())
    assert np.allclose(v * k / abs(k), u, atol=1e-10)


def test_is_phased_cnot_rejects():
    assert not is_phased_cnot(np.eye(4))
    assert not is_phased_cnot(SWAP)
    assert not is_phased_cnot(np.kron(H, H))


def test_controlled_u():
    assert np.array_equal(controlled_u([I2, I2]).matrix(), np.eye(4))
    assert np.array_equal(controlled_u([I2, X]).matrix(), C12)
    with pytest.raises(GateError):
        controlled_u([])
    with pytest.raises(GateError):
        controlled_u([np.eye(4)])
    op = controlled_u([I2, X, Z])
    assert op.k_max == 3 and op.matrix().shape == (6, 6)


def test_controlled_z_oracle():
    cz = controlled_u([I2, Z]).matrix()
    s = prepare(["+", "+"])
    oracle = np.diag([1, 1, 1, -1]) @ np.full(4, 0.5)
    out = apply(s, cz, [0, 1])
    assert np.allclose(out.amps, oracle, atol=1e-12)
    assert fidelity(out, s) == pytest.approx(0.25)


def test_measurement_gate_eq_and_reversibility(rng):
    for _ in range(1000):
        a, b = random_qubit(rng)
        s = prepare([[a, b], "0"])
        out = apply(s, C12, [0, 1])
        assert np.max(np.abs(out.amps - np.array([a, 0, 0, b]))) < 1e-12
        back = apply(out, C12, [0, 1])
        assert np.max(np.abs(back.amps - s.amps)) < 1e-12


def test_bell_pairs():
    assert np.allclose(bell_pair("phi+").amps, [S, 0, 0, S])
    vecs = [bell_pair(k).amps for k in BELL_KINDS]
    gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    assert np.allclose(gram, np.eye(4), atol=1e-12)
    made = apply(prepare(["+", "0"]), C12, [0, 1])
    assert fidelity(made, bell_pair("phi+")) == pytest.approx(1)


def test_bell_measure_examples():
    assert bell_measure(bell_pair("phi-"))["phi-"] == pytest.approx(1, abs=1e-10)
    assert BELL_OUTCOME["phi-"] == ("-", 0)
    assert bell_measure(bell_pair("psi+"))["psi+"] == pytest.approx(1, abs=1e-10)
    assert BELL_OUTCOME["psi+"] == ("+", 1)
    d = bell_measure(prepare(["0", "0"]))
    assert d["phi+"] == pytest.approx(0.5) and d["phi-"] == pytest.approx(0.5)


def test_bell_measure_matches_projection_oracle(rng):
    bells = {k: bell_pair(k).amps for k in BELL_KINDS}
    for _ in range(1000):
        s = random_state(2, rng)
        d = bell_measure(s)
        assert sum(d.values()) == pytest.approx(1, abs=1e-10)
        for k, v in bells.items():
            assert abs(d[k] - abs(np.vdot(v, s.amps)) ** 2) < 1e-10


def test_swap3(rng):
    assert np.array_equal(swap3(), SWAP)
    assert np.array_equal(swap3(False), SWAP)
    assert np.array_equal(swap3() @ swap3(), np.eye(4))
    assert np.array_equal(swap3() @ basis(1), basis(2))
    for _ in range(100):
        a, b = random_qubit(rng), random_qubit(rng)
        out = apply(prepare([a, b]), swap3(), [0, 1])
        assert fidelity(out, prepare([b, a])) > 1 - 1e-10


def test_conjugate_basis(rng):
    assert np.allclose(conjugate_basis(C12, H), C21, atol=1e-12)
    u = random_unitary(4, rng)
    assert np.allclose(conjugate_basis(u, I2), u)
    assert np.allclose(conjugate_basis(conjugate_basis(u, H), H), u, atol=1e-12)
    with pytest.raises(GateError):
        conjugate_basis(I2, H)


def test_local_product_detector(rng):
    a, b = random_unitary(2, rng), random_unitary(2, rng)
    assert is_local_product(np.kron(a, b))
    assert not is_local_product(C12)
    assert is_local_product(np.diag([1, -1, -1, 1]))
