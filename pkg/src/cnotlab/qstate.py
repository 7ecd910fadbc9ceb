"""Dense state-vector engine.

Ordering is big-endian: qubit 0 is the leftmost symbol of a ket, so the
basis index of ``|e0 e1 ... e(n-1)>`` is ``sum(e_i * 2**(n-1-i))``.  For two
qubits ``|e1 e2>`` lives at index ``2*e1 + e2``.

States are immutable from the caller's point of view; every operation
returns a new :class:`QReg`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 8
NORM_TOL = 1e-10

_LABELS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / np.sqrt(2),
    "-i": np.array([1, -1j], dtype=complex) / np.sqrt(2),
}

Ket = Union[str, int, Sequence[complex], np.ndarray]
RngLike = Union[int, np.random.Generator, None]


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class QReg:
    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise StateError(f"qubit count {self.n} outside 1..{MAX_QUBITS}")
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (2**self.n,):
            raise StateError(f"expected {2**self.n} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state not normalized (|psi|^2 = {norm!r})")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, bits: str) -> "QReg":
        """Computational basis state from a bit string such as ``"0110"``."""
        n = len(bits)
        amps = np.zeros(2**n, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(n, amps)

    def tensor(self, *others: "QReg") -> "QReg":
        amps = self.amps
        n = self.n
        for o in others:
            amps = np.kron(amps, o.amps)
            n += o.n
        return QReg(n, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def ket(self, tol: float = 1e-12) -> str:
        """Human readable ket expansion, used in reports and debugging."""
        terms = []
        for k, a in enumerate(self.amps):
            if abs(a) > tol:
                terms.append(f"({a.real:+.4f}{a.imag:+.4f}j)|{k:0{self.n}b}>")
        return " ".join(terms)


@dataclass(frozen=True)
class MeasBranch:
    qubit: int
    bit: int
    probability: float
    post_state: QReg | None

    @property
    def valid(self) -> bool:
        return self.post_state is not None


def as_qubit(ket: Ket) -> np.ndarray:
    if isinstance(ket, (str, int)) and not isinstance(ket, bool):
        key = str(ket)
        if key not in _LABELS:
            raise StateError(f"unknown single-qubit label {ket!r}")
        return _LABELS[key].copy()
    v = np.asarray(ket, dtype=complex).reshape(-1)
    if v.shape != (2,):
        raise StateError(f"single-qubit state needs 2 amplitudes, got {v.size}")
    norm = np.vdot(v, v).real
    if abs(norm - 1.0) > NORM_TOL:
        raise StateError(f"single-qubit state not normalized (|psi|^2 = {norm!r})")
    return v


def prepare(kets: Sequence[Ket]) -> QReg:
    """Tensor product of single-qubit states, qubit 0 first."""
    if len(kets) == 0:
        raise StateError("need at least one qubit")
    if len(kets) > MAX_QUBITS:
        raise StateError(f"{len(kets)} qubits exceeds the cap of {MAX_QUBITS}")
    amps = np.array([1.0 + 0j])
    for k in kets:
        amps = np.kron(amps, as_qubit(k))
    return QReg(len(kets), amps)


def _check_targets(n: int, targets: Sequence[int]) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise StateError(f"repeated target index in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise StateError(f"target {t} out of range for {n} qubits")
    return targets


def apply(state: QReg, u: np.ndarray, targets: Sequence[int]) -> QReg:
    """Apply ``u`` to ``targets``; ``targets[0]`` is the most significant
    qubit of ``u``'s own basis."""
    targets = _check_targets(state.n, targets)
    u = np.asarray(u, dtype=complex)
    k = len(targets)
    if u.shape != (2**k, 2**k):
        raise StateError(f"unitary of shape {u.shape} does not act on {k} qubit(s)")
    psi = state.amps.reshape([2] * state.n)
    psi = np.moveaxis(psi, targets, range(k))
    shape = psi.shape
    psi = (u @ psi.reshape(2**k, -1)).reshape(shape)
    psi = np.moveaxis(psi, range(k), targets)
    return QReg(state.n, psi.reshape(-1))


def project(state: QReg, qubit: int, bit: int) -> MeasBranch:
    _check_targets(state.n, [qubit])
    psi = state.amps.reshape([2] * state.n).copy()
    idx = [slice(None)] * state.n
    idx[qubit] = 1 - bit
    psi[tuple(idx)] = 0.0
    psi = psi.reshape(-1)
    p = float(np.vdot(psi, psi).real)
    if p <= 0.0:
        return MeasBranch(qubit, bit, 0.0, None)
    return MeasBranch(qubit, bit, p, QReg(state.n, psi / np.sqrt(p)))


def measure(state: QReg, qubit: int) -> tuple[MeasBranch, MeasBranch]:
    """Both outcomes of a computational-basis measurement.

    A zero-probability branch has ``post_state=None`` (``valid`` is False).
    """
    return project(state, qubit, 0), project(state, qubit, 1)


def make_rng(seed: RngLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(state: QReg, qubit: int, seed: RngLike) -> MeasBranch:
    """Pick one measurement branch with its Born probability.

    Consumes exactly one uniform draw from the generator, which keeps
    trajectories reproducible across callers sharing a generator.
    """
    rng = make_rng(seed)
    b0, b1 = measure(state, qubit)
    r = rng.random()
    return b0 if r < b0.probability else b1


def inner(a: QReg, b: QReg) -> complex:
    if a.n != b.n:
        raise StateError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: QReg, b: QReg) -> float:
    return min(1.0, abs(inner(a, b)) ** 2)


def equal_up_to_phase(a: QReg, b: QReg, tol: float = 1e-9) -> bool:
    return fidelity(a, b) > 1.0 - tol


def reduced_density(state: QReg, qubits: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``qubits`` (in the given order)."""
    qubits = _check_targets(state.n, qubits)
    k = len(qubits)
    psi = np.moveaxis(state.amps.reshape([2] * state.n), qubits, range(k))
    psi = psi.reshape(2**k, -1)
    return psi @ psi.conj().T


def schmidt_coefficients(state: QReg, qubits: Sequence[int]) -> np.ndarray:
    """Schmidt coefficients (descending) of the bipartition qubits | rest."""
    qubits = _check_targets(state.n, qubits)
    k = len(qubits)
    psi = np.moveaxis(state.amps.reshape([2] * state.n), qubits, range(k))
    return np.linalg.svd(psi.reshape(2**k, -1), compute_uv=False)


def qubit_fidelity(state: QReg, qubit: int, target: Ket) -> float:
    """<t| rho_q |t> for a single qubit of a possibly entangled register."""
    t = as_qubit(target)
    rho = reduced_density(state, [qubit])
    return float(min(1.0, max(0.0, np.vdot(t, rho @ t).real)))


def random_qubit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def random_state(n: int, rng: np.random.Generator) -> QReg:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return QReg(n, v / np.linalg.norm(v))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) < tol
