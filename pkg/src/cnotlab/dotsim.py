"""Two dipole-coupled quantum dots driven by a monochromatic pulse.

Units: angular frequencies in rad/s with hbar factored out of every
Hamiltonian, times in seconds, dipoles in C m, distances in m.

Free Hamiltonian over ``|e1 e2>`` (dot 1 controls, dot 2 is the target)::

    E(e1, e2) = e1*w1 + e2*w2 + (-1)**(e1+e2) * wbar
    wbar      = -d1*d2 / (4 pi eps0 hbar R**3)

Dividing by hbar turns the coupling energy into the angular frequency the
level shifts are expressed in.  The target transition for control ``e1``
is ``w2 - 2*(-1)**e1 * wbar``: the two conditional lines sit 4|wbar|
apart, twice the ``w2 +/- wbar`` shift one reads off the level picture
with a single-sided shift.

Drive on the target dot: ``Omega * cos(w t) * X/2`` (spin-1/2 operator), so
the rotating-wave Rabi frequency is ``Omega/2`` and a pulse of length
``2 pi / Omega`` is a pi pulse.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .gatelib import C12
from .qstate import QReg

HBAR = 1.054571817e-34
EPS0 = 8.8541878128e-12

# Timescales quoted for the two technologies.
QUOTED = {
    "cavity_resonant_frequency_hz": 2e10,
    "cavity_interaction_time_s": 3e-5,
    "cavity_field_lifetime_s": 0.5,
    "dot_decoherence_qed_s": 1e-6,
    "dot_decoherence_phonon_s": 1e-9,
    "dot_inv_coupling_s": 1e-12,
}
QUOTED_PULSE_LENGTH = 1e-9

Frame = Literal["full", "rwa"]


class ParamError(ValueError):
    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


@dataclass(frozen=True)
class DotParams:
    omega1: float
    omega2: float
    d1: float
    d2: float
    R: float

    def __post_init__(self):
        for name in ("omega1", "omega2", "d1", "d2", "R"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ParamError(name, f"expected a finite number, got {v!r}")
        if self.R <= 0:
            raise ParamError("R", "separation must be positive")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ParamError("omega1" if self.omega1 <= 0 else "omega2", "must be positive")

    @property
    def omega_bar(self) -> float:
        return omega_bar(self)

    @property
    def dispersive_regime(self) -> bool:
        return abs(self.omega_bar) < min(self.omega1, self.omega2) / 10


@dataclass(frozen=True)
class DriveSpec:
    Omega: float
    omega: float
    T: float
    frame: Frame = "rwa"
    dt: float | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise ParamError("T", "pulse length must be positive")
        if self.frame not in ("full", "rwa"):
            raise ParamError("frame", f"unknown frame {self.frame!r}")
        if self.dt is not None and not self.dt > 0:
            raise ParamError("dt", "step must be positive")


def omega_bar(p: DotParams) -> float:
    if p.R <= 0:
        raise ParamError("R", "separation must be positive")
    return -p.d1 * p.d2 / (4 * math.pi * EPS0 * HBAR * p.R**3)


def energies(p: DotParams) -> np.ndarray:
    wb = omega_bar(p)
    return np.array(
        [e1 * p.omega1 + e2 * p.omega2 + (-1) ** (e1 + e2) * wb for e1 in (0, 1) for e2 in (0, 1)]
    )


def hamiltonian(p: DotParams) -> np.ndarray:
    return np.diag(energies(p)).astype(complex)


def transition_frequencies(p: DotParams) -> dict:
    """Conditional resonance lines from the diagonal energies."""
    E = energies(p).reshape(2, 2)
    wb = omega_bar(p)
    target = {e1: float(E[e1, 1] - E[e1, 0]) for e1 in (0, 1)}
    control = {e2: float(E[1, e2] - E[0, e2]) for e2 in (0, 1)}
    split = abs(target[1] - target[0])
    return {
        "omega_bar": wb,
        "target_given_control": target,
        "control_given_target": control,
        "target_splitting": split,
        "splitting_over_omega_bar": split / abs(wb) if wb else float("nan"),
        # single-sided reading w2 +/- wbar would give a splitting of 2|wbar|
        "single_sided_splitting": 2 * abs(wb),
    }


def target_resonance(p: DotParams, control: int = 1) -> float:
    return p.omega2 - 2 * (-1) ** control * omega_bar(p)


def pi_pulse(p: DotParams, Omega: float = 1e11, frame: Frame = "rwa", dt: float | None = None) -> DriveSpec:
    """Resonant with the control=1 target line; Rabi angle pi."""
    return DriveSpec(Omega, target_resonance(p, 1), 2 * math.pi / Omega, frame, dt)


def max_dt(p: DotParams, d: DriveSpec) -> float:
    return 2 * math.pi / (50 * max(p.omega1, p.omega2, d.omega))


def rabi_population(Omega_R: float, Delta: float, T: float) -> float:
    """Closed-form excited population after a square pulse from the ground state."""
    W2 = Omega_R**2 + Delta**2
    if W2 == 0:
        return 0.0
    return Omega_R**2 / W2 * math.sin(math.sqrt(W2) * T / 2) ** 2


# -- propagation ------------------------------------------------------------


def _rwa_propagator(p: DotParams, d: DriveSpec) -> np.ndarray:
    E = energies(p)
    U = np.zeros((4, 4), dtype=complex)
    for e1 in (0, 1):
        i0, i1 = 2 * e1, 2 * e1 + 1
        delta = (E[i1] - E[i0]) - d.omega
        h = np.array([[0, d.Omega / 4], [d.Omega / 4, delta]], dtype=complex)
        block = expm(-1j * h * d.T)
        # back to the lab frame: |0> rotates at E0, |1> at E0 + omega
        lab = np.exp(-1j * np.array([E[i0], E[i0] + d.omega]) * d.T)
        U[i0 : i1 + 1, i0 : i1 + 1] = lab[:, None] * block
    return U


def _full_propagator(p: DotParams, d: DriveSpec) -> np.ndarray:
    """Fixed-step RK4 on the exact (non-RWA) Schrodinger equation.

    Integrated in the interaction picture of the diagonal free Hamiltonian,
    which is an exact change of variables; only the drive couplings
    g_k(t) = (Omega/2) cos(w t) exp(i w_k t) remain to be stepped.
    """
    dt_cap = max_dt(p, d)
    dt = d.dt if d.dt is not None else dt_cap
    if dt > dt_cap * (1 + 1e-12):
        raise ParamError("dt", f"step {dt:.3e} s exceeds the stability cap {dt_cap:.3e} s")
    n = max(1, math.ceil(d.T / dt - 1e-9))
    h = d.T / n
    E = energies(p)
    wk = np.array([E[1] - E[0], E[3] - E[2]])

    def g(t):
        return (d.Omega / 2) * np.cos(d.omega * t)[:, None] * np.exp(1j * wk[None, :] * t[:, None])

    t = np.arange(n) * h
    g0, gh, g1 = g(t), g(t + h / 2), g(t + h)

    # c[k, level, column]: amplitudes for block k of all four basis inputs
    c = np.zeros((2, 2, 4), dtype=complex)
    for k in (0, 1):
        c[k, 0, 2 * k] = 1
        c[k, 1, 2 * k + 1] = 1

    def f(gk, c):
        out = np.empty_like(c)
        out[:, 0] = -1j * np.conj(gk)[:, None] * c[:, 1]
        out[:, 1] = -1j * gk[:, None] * c[:, 0]
        return out

    for i in range(n):
        k1 = f(g0[i], c)
        k2 = f(gh[i], c + (h / 2) * k1)
        k3 = f(gh[i], c + (h / 2) * k2)
        k4 = f(g1[i], c + h * k3)
        c = c + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    U = c.reshape(4, 4)
    return np.exp(-1j * E * d.T)[:, None] * U


def propagator(p: DotParams, d: DriveSpec) -> np.ndarray:
    """4x4 lab-frame evolution operator over the pulse."""
    if d.frame == "rwa":
        return _rwa_propagator(p, d)
    return _full_propagator(p, d)


def evolve_driven(p: DotParams, d: DriveSpec, initial: QReg) -> QReg:
    if initial.n != 2:
        raise ValueError("dot register has two qubits")
    return QReg(2, propagator(p, d) @ initial.amps)


# -- gate quality -----------------------------------------------------------

_CNOT_ROW = np.array([0, 1, 3, 2])


@dataclass(frozen=True)
class CnotFidelity:
    P10_11: float
    P11_10: float
    P00_00: float
    P01_01: float
    raw_gate_fidelity: float
    phase_optimized_gate_fidelity: float
    output_phase_only_fidelity: float
    frame_phases: dict = field(default_factory=dict)

    @property
    def off_branch_flip(self) -> float:
        return max(1 - self.P00_00, 1 - self.P01_01)

    def to_json(self) -> dict:
        return asdict(self)


def _local_diag(a: float, b: float) -> np.ndarray:
    return np.kron(np.diag([1, np.exp(1j * a)]), np.diag([1, np.exp(1j * b)]))


def gate_trace_fidelity(U: np.ndarray, left=(0.0, 0.0), right=(0.0, 0.0)) -> float:
    """|Tr(PhiL^dag U PhiR^dag CNOT^dag)| / 4 for per-qubit diagonal phase frames."""
    L, R = _local_diag(*left), _local_diag(*right)
    return float(abs(np.trace(L.conj().T @ U @ R.conj().T @ C12.conj().T)) / 4)


def phase_frames(U: np.ndarray) -> dict:
    """Per-qubit phase frames before and after the gate that align all
    four CNOT-pattern entries of ``U``.

    Output frame (a on control, b on target) and input frame (g on target)
    suffice; an input frame on the control commutes through the CNOT.
    """
    u = U[_CNOT_ROW, np.arange(4)]
    psi = np.angle(u)
    A, B, C = psi[1] - psi[0], psi[2] - psi[0], psi[3] - psi[0]
    S = (A + B + C) / 2
    return {"left": (float(S - A), float(S - C)), "right": (0.0, float(S - B))}


def _output_only(U: np.ndarray) -> float:
    def neg(x):
        return -gate_trace_fidelity(U, (x[0], x[1]))

    axis = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    start = max(((a, b) for a in axis for b in axis), key=lambda x: -neg(x))
    r = minimize(neg, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return float(-r.fun)


def cnot_fidelity(p: DotParams, d: DriveSpec, U: np.ndarray | None = None) -> CnotFidelity:
    if U is None:
        U = propagator(p, d)
    P = np.abs(U) ** 2
    frames = phase_frames(U)
    return CnotFidelity(
        P10_11=float(P[3, 2]),
        P11_10=float(P[2, 3]),
        P00_00=float(P[0, 0]),
        P01_01=float(P[1, 1]),
        raw_gate_fidelity=gate_trace_fidelity(U),
        phase_optimized_gate_fidelity=gate_trace_fidelity(U, frames["left"], frames["right"]),
        output_phase_only_fidelity=_output_only(U),
        frame_phases={k: list(v) for k, v in frames.items()},
    )


def conditional_phase(p: DotParams, T: float) -> float:
    """ZZ phase -4*wbar*T (mod 2 pi) accumulated by the coupling during the pulse.

    Output-only phase frames cannot remove it; an input frame on the target can.
    """
    return float(np.mod(-4 * omega_bar(p) * T, 2 * np.pi))


# -- feasibility --------------------------------------------------------------


@dataclass(frozen=True)
class FeasibilityReport:
    pulse_length: float
    inv_coupling: float
    carrier_period: float
    decoherence_qed: float = QUOTED["dot_decoherence_qed_s"]
    decoherence_phonon: float = QUOTED["dot_decoherence_phonon_s"]
    quoted_pulse_length: float = QUOTED_PULSE_LENGTH
    quoted: dict = field(default_factory=lambda: dict(QUOTED))

    @property
    def pulse_over_decoherence_qed(self) -> float:
        return self.pulse_length / self.decoherence_qed

    @property
    def pulse_over_decoherence_phonon(self) -> float:
        return self.pulse_length / self.decoherence_phonon

    @property
    def inv_coupling_over_pulse(self) -> float:
        return self.inv_coupling / self.pulse_length

    @property
    def decoherence_ok(self) -> bool:
        return self.pulse_length < self.decoherence_phonon

    @property
    def selectivity_ok(self) -> bool:
        return self.pulse_length > self.inv_coupling

    @property
    def carrier_ok(self) -> bool:
        return self.pulse_length > self.carrier_period

    @property
    def passed(self) -> bool:
        return self.decoherence_ok and self.selectivity_ok

    @property
    def cavity_lifetime_over_interaction(self) -> float:
        return self.quoted["cavity_field_lifetime_s"] / self.quoted["cavity_interaction_time_s"]

    def to_json(self) -> dict:
        out = asdict(self)
        for name in (
            "pulse_over_decoherence_qed",
            "pulse_over_decoherence_phonon",
            "inv_coupling_over_pulse",
            "cavity_lifetime_over_interaction",
            "decoherence_ok",
            "selectivity_ok",
            "carrier_ok",
            "passed",
        ):
            out[name] = getattr(self, name)
        return out


def feasibility(p: DotParams, d: DriveSpec) -> FeasibilityReport:
    wb = omega_bar(p)
    return FeasibilityReport(
        pulse_length=d.T,
        inv_coupling=1 / abs(wb) if wb else math.inf,
        carrier_period=2 * math.pi / d.omega if d.omega else math.inf,
    )


# -- sweeps -----------------------------------------------------------------

SWEEP_COLUMNS = ("omega_drive", "T", "P10_11", "P00_flip", "F_raw", "F_phase_opt")


def sweep(p: DotParams, d: DriveSpec, omegas: Sequence[float]) -> list[dict]:
    rows = []
    for w in omegas:
        dd = replace(d, omega=float(w))
        U = propagator(p, dd)
        P = np.abs(U) ** 2
        frames = phase_frames(U)
        rows.append(
            {
                "omega_drive": float(w),
                "T": dd.T,
                "P10_11": float(P[3, 2]),
                "P00_flip": float(P[1, 0]),
                "F_raw": gate_trace_fidelity(U),
                "F_phase_opt": gate_trace_fidelity(U, frames["left"], frames["right"]),
            }
        )
    return rows


def default_sweep_axis(p: DotParams, points: int = 41) -> np.ndarray:
    wb = abs(omega_bar(p))
    return p.omega2 + np.linspace(-4 * wb, 4 * wb, points)


# -- parameter files --------------------------------------------------------

_DOT_FIELDS = [f.name for f in fields(DotParams)]
_DRIVE_KEYS = {"Omega", "omega_drive", "T", "frame", "dt"}


def params_from_dict(data: dict) -> tuple[DotParams, DriveSpec]:
    """Build parameters from a flat SI-unit mapping.

    ``omega_drive`` defaults to the control=1 target line and ``T`` to the
    pi pulse 2 pi / Omega.
    """
    if not isinstance(data, dict):
        raise ParamError("<root>", "parameter file must hold a JSON object")
    unknown = set(data) - set(_DOT_FIELDS) - _DRIVE_KEYS
    if unknown:
        raise ParamError(sorted(unknown)[0], "unknown field")
    for name in _DOT_FIELDS + ["Omega"]:
        if name not in data:
            raise ParamError(name, "missing field")
    for name in _DOT_FIELDS + ["Omega", "omega_drive", "T", "dt"]:
        v = data.get(name)
        if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))):
            raise ParamError(name, f"expected a number, got {v!r}")
    p = DotParams(**{k: float(data[k]) for k in _DOT_FIELDS})
    if not p.dispersive_regime:
        warnings.warn("|omega_bar| is not small against the dot frequencies", stacklevel=2)
    Omega = float(data["Omega"])
    if not Omega > 0:
        raise ParamError("Omega", "drive amplitude must be positive")
    omega = data.get("omega_drive")
    T = data.get("T")
    d = DriveSpec(
        Omega=Omega,
        omega=float(omega) if omega is not None else target_resonance(p, 1),
        T=float(T) if T is not None else 2 * math.pi / Omega,
        frame=data.get("frame", "rwa"),
        dt=data.get("dt"),
    )
    return p, d


def load_params(path: str | Path | None = None) -> tuple[DotParams, DriveSpec]:
    if path is None:
        text = resources.files("cnotlab.data").joinpath("default_dots.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParamError("<file>", f"invalid JSON ({exc.msg})") from None
    return params_from_dict(data)


def default_params() -> tuple[DotParams, DriveSpec]:
    return load_params(None)
