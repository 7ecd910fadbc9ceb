"""Newline-delimited ASCII wire format.

    HELLO <ALICE|BOB>
    APPLY <CNOT|X|H|Z> <q> [<q2>]
    MEASURE <q>
    RESULT <0|1>
    BIT <0|1>
    DONE
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

MAX_LINE = 64

VERBS = ("HELLO", "APPLY", "MEASURE", "RESULT", "BIT", "DONE")
ROLES = ("ALICE", "BOB")
GATE_ARITY = {"CNOT": 2, "X": 1, "H": 1, "Z": 1}

Arg = Union[str, int]


class WireError(ValueError):
    pass


@dataclass(frozen=True)
class WireMessage:
    verb: str
    args: tuple[Arg, ...] = ()

    def __init__(self, verb: str, args=()):
        object.__setattr__(self, "verb", verb)
        object.__setattr__(self, "args", tuple(args))

    def __str__(self) -> str:
        return " ".join([self.verb, *map(str, self.args)])

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.verb == "APPLY":
            return tuple(self.args[1:])
        if self.verb == "MEASURE":
            return (self.args[0],)
        return ()


def _qubit(tok: str) -> int:
    if not tok.isdigit():
        raise WireError(f"malformed qubit index {tok!r}")
    return int(tok)


def _bit(tok: str) -> int:
    if tok not in ("0", "1"):
        raise WireError(f"malformed bit {tok!r}")
    return int(tok)


def _validate(verb: str, toks: list[str]) -> tuple[Arg, ...]:
    if verb not in VERBS:
        raise WireError(f"unknown verb {verb!r}")
    if verb == "DONE":
        if toks:
            raise WireError("DONE takes no arguments")
        return ()
    if verb == "HELLO":
        if len(toks) != 1 or toks[0] not in ROLES:
            raise WireError(f"malformed role in HELLO {' '.join(toks)!r}")
        return (toks[0],)
    if verb in ("RESULT", "BIT"):
        if len(toks) != 1:
            raise WireError(f"malformed bit: {verb} takes one argument")
        return (_bit(toks[0]),)
    if verb == "MEASURE":
        if len(toks) != 1:
            raise WireError("MEASURE takes one qubit")
        return (_qubit(toks[0]),)
    # APPLY
    if not toks or toks[0] not in GATE_ARITY:
        raise WireError(f"unknown gate in APPLY {' '.join(toks)!r}")
    arity = GATE_ARITY[toks[0]]
    if len(toks) != 1 + arity:
        raise WireError(f"APPLY {toks[0]} takes {arity} qubit(s)")
    qs = tuple(_qubit(t) for t in toks[1:])
    if len(set(qs)) != len(qs):
        raise WireError("APPLY qubits must be distinct")
    return (toks[0], *qs)


def encode(msg: WireMessage) -> bytes:
    toks = [str(a) for a in msg.args]
    args = _validate(msg.verb, toks)
    if args != msg.args:
        raise WireError(f"argument types do not match the grammar: {msg!r}")
    line = (str(msg) + "\n").encode("ascii")
    if len(line) > MAX_LINE:
        raise WireError(f"oversize line ({len(line)} > {MAX_LINE} bytes)")
    return line


def decode(line: Union[bytes, str]) -> WireMessage:
    if isinstance(line, str):
        line = line.encode("ascii", errors="replace")
    if len(line) > MAX_LINE:
        raise WireError(f"oversize line ({len(line)} > {MAX_LINE} bytes)")
    if not line.endswith(b"\n"):
        raise WireError("line not newline-terminated")
    try:
        text = line[:-1].decode("ascii")
    except UnicodeDecodeError:
        raise WireError("non-ASCII bytes on the wire") from None
    toks = text.split(" ")
    if any(t == "" for t in toks):
        raise WireError(f"malformed separators in {text!r}")
    verb, rest = toks[0], toks[1:]
    return WireMessage(verb, _validate(verb, rest))
