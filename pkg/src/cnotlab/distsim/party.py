"""Alice and Bob as round-based state machines.

A party never sees amplitudes.  It asks the referee to APPLY gates and
MEASURE its own qubits, and learns only RESULT bits, plus the BIT messages
relayed from the other party.

Each party emits one batch of messages per round, the batch ending in a
terminator verb (HELLO, MEASURE, BIT, DONE):

    round 0   HELLO
    round 1   Step 1 CNOTs, then the Step 2 measurement
    round 2   BIT (own Step 2 result)
    round 3   Step 2 negation if the bits differ, Step 3 H, Step 4 measurement
    round 4   BIT (own Step 4 result)
    round 5   Step 4 Z if the bits differ, DONE
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .wire import WireMessage

TERMINATORS = frozenset({"HELLO", "MEASURE", "BIT", "DONE"})
ROUNDS = 6


class ProtocolViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Layout:
    name: str
    owned: tuple[int, ...]
    cnots: tuple[tuple[int, int], ...]
    step2_qubit: int
    unmeasured: tuple[int, ...]
    rotate: int
    step4_qubit: int
    phase_fix: int


LAYOUTS = {
    "ALICE": Layout("ALICE", (0, 1, 2), ((1, 0), (0, 2)), 2, (0, 1), 1, 1, 0),
    "BOB": Layout("BOB", (3, 4, 5), ((5, 4), (3, 5)), 4, (3, 5), 3, 3, 5),
}


@dataclass
class PartyMachine:
    role: str
    round: int = 0
    results: list[int] = field(default_factory=list)
    peer_bits: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.role not in LAYOUTS:
            raise ValueError(f"unknown role {self.role!r}")
        self.layout = LAYOUTS[self.role]

    @property
    def owned_qubits(self) -> tuple[int, ...]:
        return self.layout.owned

    @property
    def step(self) -> int:
        """Protocol step currently being executed (0 before Step 1)."""
        return (0, 1, 2, 3, 4, 4)[min(self.round, ROUNDS - 1)]

    @property
    def finished(self) -> bool:
        return self.round >= ROUNDS

    def receive(self, msg: WireMessage) -> None:
        if msg.verb == "RESULT":
            self.results.append(msg.args[0])
        elif msg.verb == "BIT":
            self.peer_bits.append(msg.args[0])
        else:
            raise ProtocolViolation(f"{self.role} cannot accept {msg}")

    def ready(self) -> bool:
        need = {2: (1, 0), 3: (1, 1), 4: (2, 1), 5: (2, 2)}.get(self.round, (0, 0))
        return len(self.results) >= need[0] and len(self.peer_bits) >= need[1]

    def step_round(self) -> list[WireMessage]:
        if self.finished:
            raise ProtocolViolation(f"{self.role} has already finished")
        if not self.ready():
            raise ProtocolViolation(f"{self.role} stepped before its inputs arrived")
        out = getattr(self, f"_round{self.round}")()
        self.round += 1
        return out

    def _round0(self):
        return [WireMessage("HELLO", [self.role])]

    def _round1(self):
        L = self.layout
        out = [WireMessage("APPLY", ["CNOT", c, t]) for c, t in L.cnots]
        out.append(WireMessage("MEASURE", [L.step2_qubit]))
        return out

    def _round2(self):
        return [WireMessage("BIT", [self.results[0]])]

    def _round3(self):
        L = self.layout
        out = []
        if self.results[0] != self.peer_bits[0]:
            out += [WireMessage("APPLY", ["X", q]) for q in L.unmeasured]
        out.append(WireMessage("APPLY", ["H", L.rotate]))
        out.append(WireMessage("MEASURE", [L.step4_qubit]))
        return out

    def _round4(self):
        return [WireMessage("BIT", [self.results[1]])]

    def _round5(self):
        out = []
        if self.results[1] != self.peer_bits[1]:
            out.append(WireMessage("APPLY", ["Z", self.layout.phase_fix]))
        out.append(WireMessage("DONE"))
        return out
