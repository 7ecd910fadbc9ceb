"""Ramsey interferometer R1 / C / R2 acting on (cavity field, atom).

Qubit order is field first: ``|e1 e2> = |e1>_field |e2>_atom``.

half_flip
    pi/2 pulse (1/sqrt2)[[1, -e^{-ia}], [e^{ia}, 1]].  Column 0 is
    (|0> + e^{ia}|1>)/sqrt2; column 1 carries the conjugate phase, which is
    what unitarity requires.  For a in {0, pi} this is the textbook
    |e> -> (|e> + (-1)^e e^{ia} |1-e>)/sqrt2 pattern verbatim.

dispersive
    ``literal``:    exp(i (-1)^(1-e2) (e1+e2) theta)  -> diag(1, e^{it}, e^{-it}, e^{2it})
    ``lightshift``: exp(i (-1)^(1-e2) e1 theta)       -> diag(1, 1, e^{-it}, e^{it})

The literal form at theta = pi is diag(1,-1,-1,1) = Z (x) Z, so the whole
sequence factorises and never entangles.  The light-shift form (phase per
photon only) reaches the phased-CNOT family, e.g. at theta = pi/2,
a2 = a1 + pi.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import least_squares

from .gatelib import PhasedCnotParams, is_local_product, phased_pattern

Model = Literal["literal", "lightshift"]
MODELS = ("literal", "lightshift")
TWO_PI = 2 * np.pi
_GOLD = (np.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class RamseyParams:
    alpha1: float
    alpha2: float
    theta: float
    dispersive_model: Model = "lightshift"

    def __post_init__(self):
        if not np.all(np.isfinite([self.alpha1, self.alpha2, self.theta])):
            raise ValueError("Ramsey phases must be finite")
        if self.dispersive_model not in MODELS:
            raise ValueError(f"unknown dispersive model {self.dispersive_model!r}")


def half_flip(alpha: float) -> np.ndarray:
    e = np.exp(1j * alpha)
    return np.array([[1, -np.conj(e)], [e, 1]], dtype=complex) / np.sqrt(2)


def _dispersive_phases(theta, model: str) -> np.ndarray:
    """Diagonal of the dispersive unitary in |e1 e2> order; broadcasts over theta."""
    theta = np.asarray(theta, dtype=float)
    if model == "literal":
        k = np.array([0, 1, -1, 2])
    elif model == "lightshift":
        k = np.array([0, 0, -1, 1])
    else:
        raise ValueError(f"unknown dispersive model {model!r}")
    return np.exp(1j * theta[..., None] * k)


def dispersive(theta: float, model: Model = "literal") -> np.ndarray:
    return np.diag(_dispersive_phases(theta, model))


def compose_sequence(p: RamseyParams) -> np.ndarray:
    """(I (x) R2) C (I (x) R1)."""
    r1 = np.kron(np.eye(2), half_flip(p.alpha1))
    r2 = np.kron(np.eye(2), half_flip(p.alpha2))
    return r2 @ dispersive(p.theta, p.dispersive_model) @ r1


def residual(u: np.ndarray) -> float:
    return phased_pattern(u)[0]


def extract_phases(u: np.ndarray) -> PhasedCnotParams:
    return PhasedCnotParams(*phased_pattern(u)[1])


def block_phase_mismatch(u: np.ndarray) -> float:
    """min over phi of max |B1 - e^{i phi} B0| for the two field blocks.

    Zero means the sequence acts identically on the atom whatever the
    photon number, i.e. it cannot entangle.
    """
    b0, b1 = u[:2, :2], u[2:, 2:]
    ov = np.vdot(b0, b1)
    phi = np.angle(ov) if abs(ov) > 0 else 0.0
    return float(np.abs(b1 - np.exp(1j * phi) * b0).max())


def is_entangling(u: np.ndarray, tol: float = 1e-10) -> bool:
    return not is_local_product(u, tol)


@dataclass(frozen=True)
class Solution:
    params: RamseyParams
    phases: PhasedCnotParams
    residual: float
    entangling: bool

    def to_json(self) -> dict:
        p = self.params
        return {
            "a1": p.alpha1,
            "a2": p.alpha2,
            "theta": p.theta,
            "model": p.dispersive_model,
            "residual": self.residual,
            "phases": self.phases.as_array().tolist(),
            "entangling": self.entangling,
        }


@dataclass
class SolveResult:
    model: str
    solutions: list[Solution]
    best: Solution
    grid_size: int

    @property
    def found(self) -> bool:
        return bool(self.solutions)


def _grid_objective(a1, a2, th, model):
    """Vectorised residual and smooth surrogate over broadcast arrays.

    Both blocks are 2x2 atom operators R2 diag(ph_k) R1; block 0 must be
    diagonal and block 1 anti-diagonal.
    """
    e1 = np.exp(1j * a1)
    e2 = np.exp(1j * a2)
    ph = _dispersive_phases(th, model)
    s = 0.5
    out = {}
    for k, (p0, p1) in enumerate(((ph[..., 0], ph[..., 1]), (ph[..., 2], ph[..., 3]))):
        # R2 diag(p0, p1) R1 written out entrywise
        m00 = s * (p0 - np.conj(e2) * p1 * e1)
        m01 = s * (-p0 * np.conj(e1) - np.conj(e2) * p1)
        m10 = s * (e2 * p0 + p1 * e1)
        m11 = s * (-e2 * p0 * np.conj(e1) + p1)
        out[k] = (m00, m01, m10, m11)
    b0, b1 = out[0], out[1]
    off = [np.abs(b0[1]), np.abs(b0[2]), np.abs(b1[0]), np.abs(b1[3])]
    on = [np.abs(b0[0]), np.abs(b0[3]), np.abs(b1[1]), np.abs(b1[2])]
    res = np.maximum(np.max(off, axis=0), np.max([np.abs(1 - o) for o in on], axis=0))
    smooth = sum(o**2 for o in off)
    return res, smooth, (b0[1], b0[2], b1[0], b1[3])


def _polish(x0: np.ndarray, free: tuple[bool, bool, bool], model: str) -> np.ndarray:
    """Least-squares polish on the complex off-pattern entries."""
    idx = [i for i in range(3) if free[i]]
    x = np.array(x0, dtype=float)

    def fun(v):
        y = x.copy()
        y[idx] = v
        off = np.array(_grid_objective(*y, model)[2])
        return np.concatenate([off.real, off.imag])

    r = least_squares(fun, x[idx], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    x[idx] = r.x
    return x


def _golden(f, lo: float, hi: float, iters: int = 60) -> float:
    a, b = lo, hi
    c, d = b - _GOLD * (b - a), a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    return (a + b) / 2


def _refine(x0: np.ndarray, free: tuple[bool, bool, bool], model: str, sweeps: int = 8) -> np.ndarray:
    """Cyclic golden-section line searches on the smooth off-pattern weight."""
    x = np.array(x0, dtype=float)
    h = TWO_PI / 32

    def objective(y):
        return float(_grid_objective(*y, model)[1])

    for _ in range(sweeps):
        for i in range(3):
            if not free[i]:
                continue

            def f(v, i=i):
                y = x.copy()
                y[i] = v
                return objective(y)

            v = _golden(f, x[i] - h, x[i] + h)
            if f(v) <= f(x[i]):
                x[i] = v
        h /= 2
    return x


def solve_phases(
    model: Model = "lightshift",
    grid_size: int = 64,
    refine: bool = True,
    theta: float | None = None,
    tol: float = 1e-8,
    refine_top: int = 8,
) -> SolveResult:
    """Grid search of (alpha1, alpha2, theta) for a phased-CNOT composite.

    With ``theta`` given only the two pulse phases are scanned.  Every grid
    point (and refined point) with residual below ``tol`` is returned,
    sorted by residual then lexicographically by parameters.  An empty
    list is a finding, not an error; ``best`` is always populated.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    axis = np.arange(grid_size) * TWO_PI / grid_size
    th_axis = axis if theta is None else np.array([float(theta)])
    A1, A2, TH = np.meshgrid(axis, axis, th_axis, indexing="ij")
    res = _grid_objective(A1, A2, TH, model)[0]

    flat = res.ravel()
    points = np.stack([A1.ravel(), A2.ravel(), TH.ravel()], axis=1)
    # lowest residual first, ties broken lexicographically
    order = np.lexsort((points[:, 2], points[:, 1], points[:, 0], flat))
    cands = [tuple(points[i]) for i in order if flat[i] < tol]

    if refine:
        free = (True, True, theta is None)
        for i in order[:refine_top]:
            if flat[i] < tol:
                continue
            x = _polish(_refine(points[i], free, model), free, model)
            x = np.mod(x, TWO_PI)
            if theta is not None:
                x[2] = float(theta)
            cands.append(tuple(x))

    def solution(pt) -> Solution:
        p = RamseyParams(float(pt[0]), float(pt[1]), float(pt[2]), model)
        u = compose_sequence(p)
        r, th = phased_pattern(u)
        return Solution(p, PhasedCnotParams(*th), r, is_entangling(u))

    def key(s: Solution):
        return (s.residual, s.params.alpha1, s.params.alpha2, s.params.theta)

    pool = [solution(pt) for pt in cands] + [solution(points[order[0]])]
    keep = sorted((s for s in pool[:-1] if s.residual < tol), key=key)
    best = min(pool, key=key)
    return SolveResult(model, keep, best, grid_size)


def literal_pi_finding(grid_size: int = 64) -> dict:
    """Scan the pulse phases with the literal dispersive phase at theta = pi."""
    result = solve_phases("literal", grid_size, refine=True, theta=np.pi)
    axis = np.arange(grid_size) * TWO_PI / grid_size
    worst_mismatch = 0.0
    any_entangling = False
    for a1, a2 in itertools.product(axis, axis):
        u = compose_sequence(RamseyParams(a1, a2, np.pi, "literal"))
        worst_mismatch = max(worst_mismatch, block_phase_mismatch(u))
        any_entangling |= is_entangling(u)
    return {
        "model": "literal",
        "theta": float(np.pi),
        "grid": grid_size,
        "best_residual": result.best.residual,
        "best": result.best.to_json(),
        "reaches_phased_cnot": result.found,
        "max_block_phase_mismatch": worst_mismatch,
        "any_entangling": bool(any_entangling),
    }
