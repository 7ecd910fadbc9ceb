"""Controlled-NOT family, Bell states and the composite gate identities."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qstate import QReg, StateError, apply, is_unitary, measure

_S = 1 / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _S
XZ = X @ Z

_STD = {"I": I2, "X": X, "Z": Z, "H": H}

BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")
# (control sign, target bit) for each Bell state after C12 and H on the control
BELL_OUTCOME = {"phi+": ("+", 0), "phi-": ("-", 0), "psi+": ("+", 1), "psi-": ("-", 1)}

SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


class GateError(ValueError):
    pass


def std_gate(name: str) -> np.ndarray:
    """X (bit negation), Z (sign flip), H (the 1/sqrt2 rotation) or I."""
    try:
        return _STD[name.upper()].copy()
    except KeyError:
        raise GateError(f"unknown gate {name!r}") from None


def pauli(label: str) -> np.ndarray:
    """Product of single-qubit gates in application order, e.g. 'XZ' = Z@X."""
    u = I2.copy()
    for ch in label:
        u = std_gate(ch) @ u
    return u


def cnot(control: int = 0, target: int = 1) -> np.ndarray:
    """4x4 controlled-NOT on the ordered pair (qubit 0, qubit 1) of its own basis.

    ``cnot(0, 1)`` is C12 (first qubit controls), ``cnot(1, 0)`` is C21.
    The labels only need to be distinct: the lower one is taken as the
    first qubit of the pair.
    """
    if control == target:
        raise GateError("control and target must differ")
    u = np.zeros((4, 4), dtype=complex)
    first_controls = control < target
    for e1 in (0, 1):
        for e2 in (0, 1):
            if first_controls:
                out = (e1, e1 ^ e2)
            else:
                out = (e1 ^ e2, e2)
            u[2 * out[0] + out[1], 2 * e1 + e2] = 1.0
    return u


C12 = cnot(0, 1)
C21 = cnot(1, 0)


@dataclass(frozen=True)
class PhasedCnotParams:
    theta00: float = 0.0
    theta01: float = 0.0
    theta10: float = 0.0
    theta11: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise GateError("phases must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.theta00, self.theta01, self.theta10, self.theta11], dtype=float)

    def reduced(self) -> "PhasedCnotParams":
        return PhasedCnotParams(*np.mod(self.as_array(), 2 * np.pi))


def phased_cnot(p: PhasedCnotParams) -> np.ndarray:
    """|e1 e2> -> exp(i theta_{e1 e2}) |e1, e1 xor e2>."""
    return C12 @ np.diag(np.exp(1j * p.as_array()))


def phased_pattern(u: np.ndarray) -> tuple[float, np.ndarray]:
    """Distance of ``u`` from the phased-CNOT family and the extracted phases.

    The family absorbs any global phase, so no separate phase fit is
    needed.  Returns ``(residual, thetas)`` where the residual is the
    largest of the off-pattern magnitudes and ``1 - |pattern entry|``.
    """
    u = np.asarray(u)
    cols = np.arange(4)
    rows = np.array([0, 1, 3, 2])
    pattern = u[rows, cols]
    mask = np.ones((4, 4), dtype=bool)
    mask[rows, cols] = False
    off = np.abs(u[mask]).max()
    on = np.abs(1.0 - np.abs(pattern)).max()
    return float(max(off, on)), np.angle(pattern)


def is_phased_cnot(u: np.ndarray, tol: float = 1e-8) -> bool:
    return phased_pattern(u)[0] < tol


@dataclass(frozen=True)
class ControlledOp:
    branches: tuple[np.ndarray, ...]

    @property
    def k_max(self) -> int:
        return len(self.branches)

    def matrix(self) -> np.ndarray:
        """sum_k |k><k| (x) U_k as a block-diagonal matrix."""
        k = len(self.branches)
        u = np.zeros((2 * k, 2 * k), dtype=complex)
        for i, b in enumerate(self.branches):
            u[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = b
        return u


def controlled_u(branches: Sequence[np.ndarray]) -> ControlledOp:
    if len(branches) == 0:
        raise GateError("need at least one branch unitary")
    out = []
    for b in branches:
        b = np.asarray(b, dtype=complex)
        if b.shape != (2, 2):
            raise GateError(f"branch unitaries must be 2x2, got {b.shape}")
        if not is_unitary(b):
            raise GateError("branch is not unitary")
        out.append(b)
    return ControlledOp(tuple(out))


def bell_pair(kind: str) -> QReg:
    s = {"phi+": (1, 0, 0, 1), "phi-": (1, 0, 0, -1), "psi+": (0, 1, 1, 0), "psi-": (0, 1, -1, 0)}
    try:
        return QReg(2, np.array(s[kind.lower()], dtype=complex) * _S)
    except KeyError:
        raise GateError(f"unknown Bell state {kind!r}") from None


def bell_measure(state: QReg) -> dict[str, float]:
    """Bell-basis measurement by C12, H on the control, then two
    computational measurements.

    Control bit 0 means sign '+', since H sends (|0>+|1>)/sqrt2 to |0>.
    """
    if state.n != 2:
        raise StateError("Bell measurement needs a 2-qubit state")
    s = apply(apply(state, C12, [0, 1]), H, [0])
    kinds = {v: k for k, v in BELL_OUTCOME.items()}
    dist = {k: 0.0 for k in BELL_KINDS}
    for bc in measure(s, 0):
        if not bc.valid:
            continue
        for bt in measure(bc.post_state, 1):
            sign = "+" if bc.bit == 0 else "-"
            dist[kinds[(sign, bt.bit)]] += bc.probability * bt.probability
    return dist


def swap3(control_first: bool = True) -> np.ndarray:
    """Three cascaded CNOTs; either ordering gives the SWAP."""
    if control_first:
        return C12 @ C21 @ C12
    return C21 @ C12 @ C21


def conjugate_basis(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """(v (x) v) u (v (x) v)^dagger."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (4, 4) or v.shape != (2, 2):
        raise GateError(f"expected 4x4 and 2x2, got {u.shape} and {v.shape}")
    vv = np.kron(v, v)
    return vv @ u @ vv.conj().T


def operator_schmidt(u: np.ndarray) -> np.ndarray:
    """Operator-Schmidt coefficients of a 4x4 matrix across the 2|2 cut."""
    r = np.asarray(u).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    return np.linalg.svd(r, compute_uv=False)


def is_local_product(u: np.ndarray, tol: float = 1e-10) -> bool:
    """True when ``u`` factors as A (x) B, i.e. cannot entangle."""
    s = operator_schmidt(u)
    return bool(s[1] < tol * max(s[0], 1.0))
