"""Referee: sole owner of the simulated six-qubit register.

The referee serialises every state mutation, answers MEASURE with RESULT,
relays BIT messages between the parties without looking at them beyond
bookkeeping, and checks ownership and step order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import gatelib as g
from ..protocols import BranchReport, initial_register
from ..qstate import RngLike, apply, as_qubit, make_rng, qubit_fidelity, sample
from .party import LAYOUTS, ProtocolViolation
from .wire import WireMessage

SHORT = {"ALICE": "A", "BOB": "B", "REFEREE": "R"}
PARTY_NAME = {"ALICE": "Alice", "BOB": "Bob"}
PEER = {"ALICE": "BOB", "BOB": "ALICE"}
_GATES = {"CNOT": g.C12, "X": g.X, "H": g.H, "Z": g.Z}


@dataclass(frozen=True)
class TranscriptEntry:
    dir: str
    raw: str

    def to_json(self) -> dict:
        return {"dir": self.dir, "raw": self.raw}


def _expected(role: str, results: list[int], peer_bits: list[int]) -> list[WireMessage | None]:
    """Messages the honest party must send, as far as currently determined.

    ``None`` marks a BIT whose value is free.
    """
    L = LAYOUTS[role]
    seq: list[WireMessage | None] = [WireMessage("HELLO", [role])]
    seq += [WireMessage("APPLY", ["CNOT", c, t]) for c, t in L.cnots]
    seq += [WireMessage("MEASURE", [L.step2_qubit]), None]
    if not (results and peer_bits):
        return seq
    if results[0] != peer_bits[0]:
        seq += [WireMessage("APPLY", ["X", q]) for q in L.unmeasured]
    seq += [WireMessage("APPLY", ["H", L.rotate]), WireMessage("MEASURE", [L.step4_qubit]), None]
    if not (len(results) > 1 and len(peer_bits) > 1):
        return seq
    if results[1] != peer_bits[1]:
        seq.append(WireMessage("APPLY", ["Z", L.phase_fix]))
    seq.append(WireMessage("DONE"))
    return seq


class Referee:
    def __init__(self, alpha, beta, seed: RngLike):
        self.alpha = as_qubit(alpha)
        self.beta = as_qubit(beta)
        self.rng: np.random.Generator = make_rng(seed)
        self.reg = initial_register(self.alpha, self.beta)
        self.transcript: list[TranscriptEntry] = []
        self.probability = 1.0
        self.results = {"ALICE": [], "BOB": []}
        self.sent_bits = {"ALICE": [], "BOB": []}
        self.corrections: list[tuple[str, int, str]] = []
        self.position = {"ALICE": 0, "BOB": 0}
        self.done = {"ALICE": False, "BOB": False}

    def _log(self, src: str, dst: str, msg: WireMessage):
        self.transcript.append(TranscriptEntry(f"{SHORT[src]}→{SHORT[dst]}", str(msg)))

    def _check(self, role: str, msg: WireMessage):
        owned = LAYOUTS[role].owned
        for q in msg.qubits:
            if q not in owned:
                raise ProtocolViolation(f"ownership violation: {role} sent '{msg}' touching qubit {q}")
        exp = _expected(role, self.results[role], self.sent_bits[PEER[role]])
        pos = self.position[role]
        if pos >= len(exp):
            raise ProtocolViolation(f"protocol-order violation: {role} sent '{msg}' out of turn")
        want = exp[pos]
        ok = msg.verb == "BIT" if want is None else msg == want
        if not ok:
            raise ProtocolViolation(
                f"protocol-order violation: {role} sent '{msg}', expected '{want or 'BIT <0|1>'}'"
            )
        self.position[role] += 1

    def handle(self, role: str, msg: WireMessage) -> list[tuple[str, WireMessage]]:
        """Process one message from ``role``; returns deliveries (recipient, message)."""
        if role not in LAYOUTS:
            raise ProtocolViolation(f"unknown sender {role!r}")
        if self.done[role]:
            raise ProtocolViolation(f"protocol-order violation: {role} sent '{msg}' after DONE")
        if msg.verb == "BIT":
            self._log(role, PEER[role], msg)
        else:
            self._log(role, "REFEREE", msg)
        self._check(role, msg)

        if msg.verb == "APPLY":
            gate, *qs = msg.args
            self.reg = apply(self.reg, _GATES[gate], qs)
            if gate in ("X", "Z"):
                self.corrections.append((PARTY_NAME[role], qs[0], gate))
            return []
        if msg.verb == "MEASURE":
            branch = sample(self.reg, msg.args[0], self.rng)
            self.reg = branch.post_state
            self.probability *= branch.probability
            self.results[role].append(branch.bit)
            reply = WireMessage("RESULT", [branch.bit])
            self._log("REFEREE", role, reply)
            return [(role, reply)]
        if msg.verb == "BIT":
            self.sent_bits[role].append(msg.args[0])
            return [(PEER[role], msg)]
        if msg.verb == "DONE":
            self.done[role] = True
        return []

    @property
    def finished(self) -> bool:
        return all(self.done.values())

    def branch_report(self) -> BranchReport:
        if not self.finished:
            raise ProtocolViolation("session not finished")
        a, b = self.results["ALICE"], self.results["BOB"]
        return BranchReport(
            branch_id=f"{a[0]}{b[0]}{a[1]}{b[1]}",
            probability=self.probability,
            fidelity_H0=qubit_fidelity(self.reg, 0, self.beta),
            fidelity_H5=qubit_fidelity(self.reg, 5, self.alpha),
            corrections_applied=tuple(self.corrections),
        )
