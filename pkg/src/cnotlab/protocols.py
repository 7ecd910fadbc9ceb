"""Distributed swap over a classical channel, teleportation baseline and a
brute-force correction calibrator.

Register layout for the swap is six qubits H0..H5.  Alice holds H0 (her
unknown state alpha), H1 and H2; Bob holds H3, H4 and H5 (his unknown state
beta).  H1-H3 and H2-H4 start as (|00>+|11>)/sqrt2 pairs.

Step 1  Alice: C10 then C02.       Bob: C54 then C35.
Step 2  measure H2 (Alice) and H4 (Bob), exchange bits; if they differ each
        party negates the qubits it still holds coherently.
Step 3  H on H1 and H3.
Step 4  measure H1 and H3, exchange bits; if they differ, Z on H0 and H5.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np

from . import gatelib as g
from .qstate import (
    QReg,
    RngLike,
    apply,
    as_qubit,
    make_rng,
    measure,
    prepare,
    qubit_fidelity,
    random_qubit,
    sample,
    schmidt_coefficients,
)

ALICE, BOB = "Alice", "Bob"
OWNED = {ALICE: (0, 1, 2), BOB: (3, 4, 5)}
# qubits still coherent after Step 2 (H2/H4 have been measured)
UNMEASURED = {ALICE: (0, 1), BOB: (3, 5)}
PAULIS = ("I", "X", "Z", "XZ")

Mode = Literal["enumerate", "sample"]


@dataclass(frozen=True)
class Resources:
    pairs: int
    bits_a_to_b: int
    bits_b_to_a: int

    def __add__(self, other: "Resources") -> "Resources":
        return Resources(
            self.pairs + other.pairs,
            self.bits_a_to_b + other.bits_a_to_b,
            self.bits_b_to_a + other.bits_b_to_a,
        )

    @property
    def bits(self) -> int:
        return self.bits_a_to_b + self.bits_b_to_a


@dataclass(frozen=True)
class ClassicalBit:
    owner: str
    label: str
    bit: int
    sent_to: str


@dataclass
class ProtocolState:
    reg: QReg
    phase: int = 0
    classical_bits: list[ClassicalBit] = field(default_factory=list)
    probability: float = 1.0
    corrections: list[tuple[str, int, str]] = field(default_factory=list)

    def fork(self) -> "ProtocolState":
        return ProtocolState(
            self.reg, self.phase, list(self.classical_bits), self.probability, list(self.corrections)
        )

    def resources(self) -> Resources:
        a = sum(1 for c in self.classical_bits if c.owner == ALICE)
        b = sum(1 for c in self.classical_bits if c.owner == BOB)
        return Resources(pairs=2, bits_a_to_b=a, bits_b_to_a=b)


@dataclass(frozen=True)
class BranchReport:
    branch_id: str
    probability: float
    fidelity_H0: float
    fidelity_H5: float
    corrections_applied: tuple[tuple[str, int, str], ...]

    def to_json(self) -> dict:
        return {
            "branch": self.branch_id,
            "p": self.probability,
            "f0": self.fidelity_H0,
            "f5": self.fidelity_H5,
            "corrections": [list(c) for c in self.corrections_applied],
        }


@dataclass(frozen=True)
class TeleportBranch:
    branch_id: str
    probability: float
    fidelity: float
    corrections_applied: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "branch": self.branch_id,
            "p": self.probability,
            "f": self.fidelity,
            "corrections": list(self.corrections_applied),
        }


def initial_register(alpha, beta) -> QReg:
    """|alpha>_0 (x) Phi+_{13} (x) Phi+_{24} (x) |beta>_5."""
    a, b = as_qubit(alpha), as_qubit(beta)
    reg = prepare([a, "0", "0", "0", "0", b])
    for p, q in ((1, 3), (2, 4)):
        reg = apply(reg, g.H, [p])
        reg = apply(reg, g.C12, [p, q])
    return reg


def step1(st: ProtocolState) -> ProtocolState:
    reg = st.reg
    # Alice: C10, C02.  Bob: C54, C35.  Control listed first.
    for c, t in ((1, 0), (0, 2), (5, 4), (3, 5)):
        reg = apply(reg, g.C12, [c, t])
    st.reg, st.phase = reg, 1
    return st


def _exchange(st: ProtocolState, label: str, qa: int, qb: int, ba: int, bb: int):
    st.classical_bits.append(ClassicalBit(ALICE, f"{label}:H{qa}", ba, BOB))
    st.classical_bits.append(ClassicalBit(BOB, f"{label}:H{qb}", bb, ALICE))


def step2_correct(st: ProtocolState, ba: int, bb: int, negate_measured: bool = False) -> ProtocolState:
    if ba != bb:
        for party in (ALICE, BOB):
            qubits = OWNED[party] if negate_measured else UNMEASURED[party]
            for q in qubits:
                st.reg = apply(st.reg, g.X, [q])
                st.corrections.append((party, q, "X"))
    st.phase = 2
    return st


def step3(st: ProtocolState) -> ProtocolState:
    st.reg = apply(apply(st.reg, g.H, [1]), g.H, [3])
    st.phase = 3
    return st


def step4_correct(st: ProtocolState, ba: int, bb: int) -> ProtocolState:
    if ba != bb:
        st.reg = apply(st.reg, g.Z, [0])
        st.corrections.append((ALICE, 0, "Z"))
        st.reg = apply(st.reg, g.Z, [5])
        st.corrections.append((BOB, 5, "Z"))
    st.phase = 4
    return st


def _measure_pair(
    st: ProtocolState, qa: int, qb: int, rng: np.random.Generator | None
) -> Iterator[tuple[ProtocolState, int, int]]:
    """Alice measures qa, then Bob measures qb; yields surviving branches."""
    if rng is not None:
        ma = sample(st.reg, qa, rng)
        mb = sample(ma.post_state, qb, rng)
        out = st.fork()
        out.reg = mb.post_state
        out.probability *= ma.probability * mb.probability
        yield out, ma.bit, mb.bit
        return
    for ma in measure(st.reg, qa):
        if not ma.valid:
            continue
        for mb in measure(ma.post_state, qb):
            if not mb.valid:
                continue
            out = st.fork()
            out.reg = mb.post_state
            out.probability *= ma.probability * mb.probability
            yield out, ma.bit, mb.bit


def run_swap(
    alpha, beta, rng: np.random.Generator | None = None, negate_measured: bool = False
) -> Iterator[tuple[str, ProtocolState]]:
    """Walk the protocol tree; ``rng=None`` enumerates every branch."""
    st = step1(ProtocolState(initial_register(alpha, beta)))
    for s2, a2, b2 in _measure_pair(st, 2, 4, rng):
        _exchange(s2, "step2", 2, 4, a2, b2)
        step3(step2_correct(s2, a2, b2, negate_measured))
        for s4, a4, b4 in _measure_pair(s2, 1, 3, rng):
            _exchange(s4, "step4", 1, 3, a4, b4)
            step4_correct(s4, a4, b4)
            yield f"{a2}{b2}{a4}{b4}", s4


def report(branch_id: str, st: ProtocolState, alpha, beta) -> BranchReport:
    return BranchReport(
        branch_id=branch_id,
        probability=st.probability,
        fidelity_H0=qubit_fidelity(st.reg, 0, beta),
        fidelity_H5=qubit_fidelity(st.reg, 5, alpha),
        corrections_applied=tuple(st.corrections),
    )


def distributed_swap(
    alpha, beta, mode: Mode = "enumerate", seed: RngLike = None, negate_measured: bool = False
) -> list[BranchReport]:
    """Run the swap protocol literally and report every reachable branch
    (``mode="enumerate"``) or one seeded trajectory (``mode="sample"``)."""
    alpha, beta = as_qubit(alpha), as_qubit(beta)
    if mode == "enumerate":
        rng = None
    elif mode == "sample":
        rng = make_rng(seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return [report(bid, st, alpha, beta) for bid, st in run_swap(alpha, beta, rng, negate_measured)]


def swap_states(alpha, beta, negate_measured: bool = False) -> dict[str, ProtocolState]:
    """Final protocol state for every reachable branch (enumeration)."""
    return dict(run_swap(as_qubit(alpha), as_qubit(beta), None, negate_measured))


def swap_resources() -> Resources:
    st = next(run_swap("0", "0"))[1]
    return st.resources()


def disentanglement(st: ProtocolState) -> tuple[float, float]:
    """Largest Schmidt coefficient (squared) of H0|rest and H5|rest."""
    s0 = schmidt_coefficients(st.reg, [0])[0] ** 2
    s5 = schmidt_coefficients(st.reg, [5])[0] ** 2
    return float(s0), float(s5)


@dataclass
class CalibrationResult:
    table: dict[str, list[tuple[str, str]]]
    failures: list[str]

    @property
    def identity_only(self) -> bool:
        return not self.failures and all(v == [("I", "I")] for v in self.table.values())


def calibrate_corrections(
    alpha_samples: int = 20, seed: RngLike = 0, negate_measured: bool = False, tol: float = 1e-9
) -> CalibrationResult:
    """Search the 16 Pauli pairs on (H0, H5) per branch, applied after the
    literal protocol, that make every sampled input pair swap exactly.

    Branches with no working pair are listed in ``failures`` rather than
    raised; that would point at a non-local discrepancy.
    """
    rng = make_rng(seed)
    inputs = [(random_qubit(rng), random_qubit(rng)) for _ in range(alpha_samples)]
    candidates = {bid: set(itertools.product(PAULIS, PAULIS)) for bid in _all_branch_ids()}
    seen: set[str] = set()
    for a, b in inputs:
        for bid, st in swap_states(a, b, negate_measured).items():
            seen.add(bid)
            keep = set()
            for p0, p5 in candidates[bid]:
                reg = apply(apply(st.reg, g.pauli(p0), [0]), g.pauli(p5), [5])
                if qubit_fidelity(reg, 0, b) >= 1 - tol and qubit_fidelity(reg, 5, a) >= 1 - tol:
                    keep.add((p0, p5))
            candidates[bid] = keep
    order = {p: i for i, p in enumerate(PAULIS)}
    table = {
        bid: sorted(candidates[bid], key=lambda pq: (order[pq[0]], order[pq[1]]))
        for bid in sorted(seen)
    }
    failures = [bid for bid, v in table.items() if not v]
    return CalibrationResult(table, failures)


def apply_table(st: ProtocolState, bid: str, table: dict[str, list[tuple[str, str]]]) -> QReg:
    p0, p5 = table[bid][0]
    return apply(apply(st.reg, g.pauli(p0), [0]), g.pauli(p5), [5])


def _all_branch_ids() -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=4)]


# -- teleportation baseline -------------------------------------------------

# (Alice's bit on xi, Alice's bit on her half) -> Bob's correction
TELEPORT_CORRECTION = {"00": "I", "01": "X", "10": "Z", "11": "XZ"}


def teleport(xi, mode: Mode = "enumerate", seed: RngLike = None) -> list[TeleportBranch]:
    """Qubit 0 carries xi; qubits 1 (Alice) and 2 (Bob) share Phi+."""
    xi = as_qubit(xi)
    reg = apply(apply(prepare([xi, "0", "0"]), g.H, [1]), g.C12, [1, 2])
    reg = apply(apply(reg, g.C12, [0, 1]), g.H, [0])
    st = ProtocolState(reg)
    rng = make_rng(seed) if mode == "sample" else None
    if mode not in ("enumerate", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    out = []
    for s, m0, m1 in _measure_pair(st, 0, 1, rng):
        bid = f"{m0}{m1}"
        corr = TELEPORT_CORRECTION[bid]
        final = apply(s.reg, g.pauli(corr), [2])
        applied = tuple(c for c in corr if c != "I")
        out.append(TeleportBranch(bid, s.probability, qubit_fidelity(final, 2, xi), applied))
    return out


def teleport_resources() -> Resources:
    """One shared pair and Alice's two measured bits."""
    return Resources(pairs=1, bits_a_to_b=2, bits_b_to_a=0)


def double_teleport_resources() -> Resources:
    """Swap by teleporting in each direction."""
    one = teleport_resources()
    back = Resources(one.pairs, one.bits_b_to_a, one.bits_a_to_b)
    return one + back
