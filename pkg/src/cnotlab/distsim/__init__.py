"""Two-party simulation of the distributed swap over a classical channel."""
from .party import PartyMachine, ProtocolViolation
from .referee import Referee, TranscriptEntry
from .transport import (
    RefereeServer,
    TransportError,
    run_distributed,
    run_memory,
    run_party,
    run_tcp,
    transcript_lines,
)
from .wire import WireError, WireMessage, decode, encode

__all__ = [
    "PartyMachine",
    "ProtocolViolation",
    "Referee",
    "RefereeServer",
    "TranscriptEntry",
    "TransportError",
    "WireError",
    "WireMessage",
    "decode",
    "encode",
    "run_distributed",
    "run_memory",
    "run_party",
    "run_tcp",
    "transcript_lines",
]
