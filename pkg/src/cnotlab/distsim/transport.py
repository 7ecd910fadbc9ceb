"""Session drivers: cooperative in-memory stepping and TCP loopback.

Both drivers hand messages to the same :class:`Referee` in the same
canonical order (round by round, Alice before Bob), so transcripts agree
byte for byte across transports.
"""
from __future__ import annotations

import json
import logging
import socket
import threading
import time
from typing import BinaryIO, Iterable

from ..protocols import BranchReport
from ..qstate import RngLike
from .party import ROUNDS, TERMINATORS, PartyMachine, ProtocolViolation
from .referee import Referee, TranscriptEntry
from .wire import WireError, decode, encode

log = logging.getLogger(__name__)

ORDER = ("ALICE", "BOB")
Transcript = list[TranscriptEntry]


class TransportError(RuntimeError):
    pass


def run_memory(
    alpha, beta, seed: RngLike, parties: dict[str, PartyMachine] | None = None
) -> tuple[BranchReport, Transcript]:
    ref = Referee(alpha, beta, seed)
    parties = parties or {r: PartyMachine(r) for r in ORDER}
    for _ in range(ROUNDS):
        for role in ORDER:
            for msg in parties[role].step_round():
                for dest, out in ref.handle(role, msg):
                    parties[dest].receive(out)
    return ref.branch_report(), ref.transcript


# -- TCP ------------------------------------------------------------------


def _readline(f: BinaryIO) -> bytes:
    line = f.readline(65)
    if not line:
        raise TransportError("connection closed by peer")
    return line


def _send(sock: socket.socket, msg) -> None:
    sock.sendall(encode(msg))


class RefereeServer:
    """Single-session referee listening on a TCP port."""

    def __init__(self, alpha, beta, seed: RngLike, host: str = "127.0.0.1", port: int = 0):
        self.referee = Referee(alpha, beta, seed)
        self.sock = socket.create_server((host, port))
        self.address = self.sock.getsockname()[:2]
        self.error: BaseException | None = None

    def serve(self, timeout: float = 30.0) -> BranchReport:
        self.sock.settimeout(timeout)
        conns: dict[str, tuple[socket.socket, BinaryIO]] = {}
        pending: dict[str, object] = {}
        try:
            while len(conns) < 2:
                c, _ = self.sock.accept()
                c.settimeout(timeout)
                f = c.makefile("rb")
                hello = decode(_readline(f))
                if hello.verb != "HELLO":
                    raise ProtocolViolation(f"protocol-order violation: expected HELLO, got '{hello}'")
                role = hello.args[0]
                if role in conns:
                    raise ProtocolViolation(f"duplicate HELLO for {role}")
                conns[role] = (c, f)
                pending[role] = hello
            ref = self.referee
            # round 0: HELLOs already read, replay them in canonical order
            for role in ORDER:
                self._dispatch(conns, role, pending[role])
            for _ in range(1, ROUNDS):
                for role in ORDER:
                    f = conns[role][1]
                    while True:
                        msg = decode(_readline(f))
                        self._dispatch(conns, role, msg)
                        if msg.verb in TERMINATORS:
                            break
            return ref.branch_report()
        except BaseException as exc:
            self.error = exc
            raise
        finally:
            for c, f in conns.values():
                f.close()
                c.close()
            self.sock.close()

    def _dispatch(self, conns, role, msg):
        for dest, out in self.referee.handle(role, msg):
            _send(conns[dest][0], out)


def _connect(host: str, port: int, timeout: float) -> socket.socket:
    """Connect, retrying while the referee is not yet listening."""
    deadline = time.monotonic() + timeout
    while True:
        try:
            return socket.create_connection((host, port), timeout=timeout)
        except ConnectionRefusedError:
            if time.monotonic() > deadline:
                raise
            time.sleep(0.05)


def run_party(machine: PartyMachine, host: str, port: int, timeout: float = 30.0) -> PartyMachine:
    """Drive one party over a TCP connection to the referee."""
    with _connect(host, port, timeout) as sock:
        f = sock.makefile("rb")
        try:
            while not machine.finished:
                while not machine.ready():
                    machine.receive(decode(_readline(f)))
                for msg in machine.step_round():
                    _send(sock, msg)
        finally:
            f.close()
    return machine


def run_tcp(
    alpha, beta, seed: RngLike, host: str = "127.0.0.1", port: int = 0, timeout: float = 30.0
) -> tuple[BranchReport, Transcript]:
    """Referee and both parties on loopback TCP, each in its own thread."""
    server = RefereeServer(alpha, beta, seed, host, port)
    host, port = server.address
    errors: list[BaseException] = []
    result: list[BranchReport] = []

    def serve():
        try:
            result.append(server.serve(timeout))
        except BaseException as exc:  # reported below
            errors.append(exc)

    def party(role):
        try:
            run_party(PartyMachine(role), host, port, timeout)
        except BaseException as exc:
            errors.append(exc)

    threads = [threading.Thread(target=serve, name="referee")]
    threads += [threading.Thread(target=party, args=(r,), name=r.lower()) for r in ORDER]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout + 5)
    if server.error is not None:
        raise server.error
    if errors:
        raise TransportError(f"tcp session failed: {errors[0]!r}") from errors[0]
    if not result:
        raise TransportError("referee produced no report")
    return result[0], server.referee.transcript


def run_distributed(
    alpha, beta, transport: str = "memory", seed: RngLike = 0, port: int = 0
) -> tuple[BranchReport, Transcript]:
    if transport == "memory":
        return run_memory(alpha, beta, seed)
    if transport == "tcp":
        return run_tcp(alpha, beta, seed, port=port)
    raise ValueError(f"unknown transport {transport!r}")


def transcript_lines(transcript: Iterable[TranscriptEntry]) -> str:
    return "".join(json.dumps(e.to_json(), ensure_ascii=False) + "\n" for e in transcript)


__all__ = [
    "RefereeServer",
    "TransportError",
    "WireError",
    "run_distributed",
    "run_memory",
    "run_party",
    "run_tcp",
    "transcript_lines",
]
