import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cnotlab import protocols as pr
from cnotlab.distsim import (
    PartyMachine,
    ProtocolViolation,
    Referee,
    WireError,
    WireMessage,
    decode,
    encode,
    run_distributed,
    run_memory,
    transcript_lines,
)
from cnotlab.distsim.wire import GATE_ARITY

ALPHA = np.array([0.6, 0.8j])
BETA = "+i"

qubit = st.integers(0, 5)
messages = st.one_of(
    st.builds(lambda r: WireMessage("HELLO", [r]), st.sampled_from(["ALICE", "BOB"])),
    st.builds(lambda q: WireMessage("MEASURE", [q]), qubit),
    st.builds(lambda b: WireMessage("RESULT", [b]), st.integers(0, 1)),
    st.builds(lambda b: WireMessage("BIT", [b]), st.integers(0, 1)),
    st.just(WireMessage("DONE")),
    st.builds(lambda g, q: WireMessage("APPLY", [g, q]), st.sampled_from(["X", "H", "Z"]), qubit),
    st.builds(
        lambda pair: WireMessage("APPLY", ["CNOT", *pair]),
        st.lists(qubit, min_size=2, max_size=2, unique=True),
    ),
)


def test_wire_examples():
    assert encode(WireMessage("BIT", [1])) == b"BIT 1\n"
    assert decode("APPLY CNOT 1 0\n") == WireMessage("APPLY", ["CNOT", 1, 0])
    with pytest.raises(WireError, match="malformed bit"):
        decode("BIT 2\n")
    with pytest.raises(WireError, match="unknown verb"):
        decode("TELEPORT 1\n")
    with pytest.raises(WireError, match="oversize"):
        decode(b"APPLY X " + b"1" * 80 + b"\n")
    assert GATE_ARITY["CNOT"] == 2
    with pytest.raises(WireError):
        encode(WireMessage("APPLY", ["CNOT", 1, 1]))


@given(messages)
def test_wire_round_trip(msg):
    line = encode(msg)
    assert line.endswith(b"\n") and len(line) <= 64
    assert decode(line) == msg
    assert decode(line.decode()) == msg


def test_memory_matches_protocol_sample_seed7():
    rep, _ = run_memory(ALPHA, BETA, 7)
    ref = pr.distributed_swap(ALPHA, BETA, "sample", seed=7)[0]
    assert rep.branch_id == ref.branch_id
    assert rep.corrections_applied == ref.corrections_applied
    assert abs(rep.probability - ref.probability) < 1e-12
    assert abs(rep.fidelity_H0 - ref.fidelity_H0) < 1e-12
    assert abs(rep.fidelity_H5 - ref.fidelity_H5) < 1e-12


def test_tcp_transcript_equals_memory():
    m_rep, m_tr = run_distributed(ALPHA, BETA, "memory", 7)
    t_rep, t_tr = run_distributed(ALPHA, BETA, "tcp", 7)
    assert m_rep == t_rep
    assert transcript_lines(m_tr) == transcript_lines(t_tr)


def test_transcript_invariants():
    rep, tr = run_memory(ALPHA, BETA, 12)
    bits = [e for e in tr if e.dir in ("A→B", "B→A")]
    assert len(bits) == 4
    assert sum(e.dir == "A→B" for e in bits) == 2
    assert all(e.raw.startswith("BIT ") for e in bits)
    owned = {"A": {0, 1, 2}, "B": {3, 4, 5}}
    for e in tr:
        src = e.dir[0]
        msg = decode(e.raw + "\n")
        if src in owned and msg.verb in ("APPLY", "MEASURE"):
            assert set(msg.qubits) <= owned[src]
    line = json.loads(transcript_lines(tr).splitlines()[0])
    assert line == {"dir": "A→R", "raw": "HELLO ALICE"}
    assert min(rep.fidelity_H0, rep.fidelity_H5) > 1 - 1e-9


def test_determinism_per_seed():
    a = transcript_lines(run_memory(ALPHA, BETA, 3)[1])
    b = transcript_lines(run_memory(ALPHA, BETA, 3)[1])
    assert a == b


def test_ownership_violation():
    ref = Referee(ALPHA, BETA, 0)
    ref.handle("ALICE", WireMessage("HELLO", ["ALICE"]))
    with pytest.raises(ProtocolViolation, match="ownership violation"):
        ref.handle("ALICE", WireMessage("MEASURE", [4]))


def test_order_violation_names_message():
    ref = Referee(ALPHA, BETA, 0)
    ref.handle("ALICE", WireMessage("HELLO", ["ALICE"]))
    with pytest.raises(ProtocolViolation, match="protocol-order violation.*MEASURE 2"):
        ref.handle("ALICE", WireMessage("MEASURE", [2]))


class SkippingAlice(PartyMachine):
    def _round1(self):
        return [WireMessage("MEASURE", [2])]


def test_party_skipping_step1_aborts():
    parties = {"ALICE": SkippingAlice("ALICE"), "BOB": PartyMachine("BOB")}
    with pytest.raises(ProtocolViolation, match="protocol-order"):
        run_memory(ALPHA, BETA, 0, parties)


def test_party_refuses_foreign_qubit():
    with pytest.raises(ValueError):
        PartyMachine("CAROL")
