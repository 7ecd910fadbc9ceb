"""Command line entry point.

Exit codes: 0 success with all checks passing, 1 a check failed, 2 usage
or parameter-file error.  Reports go to stdout, logs to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings

import numpy as np

from . import dotsim, gatelib, protocols, ramsey
from .distsim import PartyMachine, RefereeServer, run_distributed, run_party, transcript_lines
from .qstate import as_qubit, fidelity, make_rng, prepare, random_qubit, apply, StateError

log = logging.getLogger("cnotlab")

OK, FAIL, USAGE = 0, 1, 2
FID_TOL = 1e-9


class UsageError(Exception):
    pass


def parse_qubit(text: str) -> np.ndarray:
    """'0', '1', '+', '-', '+i', '-i' or a normalised pair like '0.6,0.8j'."""
    try:
        if "," in text:
            a, b = (complex(t.strip()) for t in text.split(","))
            return as_qubit([a, b])
        return as_qubit(text)
    except (ValueError, StateError) as exc:
        raise UsageError(f"bad single-qubit state {text!r}: {exc}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _state_json(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in v]


# -- subcommands ------------------------------------------------------------


def cmd_bell(args) -> int:
    rows = []
    ok = True
    for kind in gatelib.BELL_KINDS:
        dist = gatelib.bell_measure(gatelib.bell_pair(kind))
        p = dist[kind]
        ok &= abs(p - 1) < 1e-10
        rows.append({"input": kind, "outcome": gatelib.BELL_OUTCOME[kind], "p": p})
    d00 = gatelib.bell_measure(prepare(["0", "0"]))
    _emit({"bell_inputs": rows, "input_00": d00, "ok": bool(ok)})
    return OK if ok else FAIL


def cmd_swap3(args) -> int:
    rng = make_rng(args.seed)
    s = gatelib.swap3()
    exact = bool(np.array_equal(s, gatelib.SWAP))
    worst = 1.0
    for _ in range(args.pairs):
        a, b = random_qubit(rng), random_qubit(rng)
        out = apply(prepare([a, b]), s, [0, 1])
        worst = min(worst, fidelity(out, prepare([b, a])))
    ok = exact and worst >= 1 - 1e-10
    _emit({"equals_swap": exact, "pairs": args.pairs, "min_fidelity": worst, "ok": ok})
    return OK if ok else FAIL


def cmd_distswap(args) -> int:
    alpha, beta = parse_qubit(args.alpha), parse_qubit(args.beta)
    out: dict = {"alpha": _state_json(alpha), "beta": _state_json(beta)}
    res = protocols.swap_resources()
    out["resources"] = res.__dict__
    if args.sample or args.transport != "memory" or args.transcript:
        report, transcript = run_distributed(alpha, beta, args.transport, args.seed, args.port)
        out["transport"] = args.transport
        out["seed"] = args.seed
        out["report"] = report.to_json()
        out["transcript"] = [e.to_json() for e in transcript]
        reports = [report]
    else:
        reports = protocols.distributed_swap(alpha, beta, "enumerate")
        out["branches"] = [r.to_json() for r in reports]
        out["total_probability"] = sum(r.probability for r in reports)
    if args.calibrate:
        cal = protocols.calibrate_corrections(args.calibrate, args.seed)
        out["calibration"] = {
            "identity_only": cal.identity_only,
            "table": {k: [list(p) for p in v] for k, v in cal.table.items()},
            "failures": cal.failures,
        }
    worst = min(min(r.fidelity_H0, r.fidelity_H5) for r in reports)
    out["min_fidelity"] = worst
    ok = worst >= 1 - FID_TOL and res.bits_a_to_b == 2 and res.bits_b_to_a == 2
    out["ok"] = ok
    _emit(out)
    return OK if ok else FAIL


def cmd_teleport(args) -> int:
    xi = parse_qubit(args.xi)
    mode = "sample" if args.sample else "enumerate"
    branches = protocols.teleport(xi, mode, args.seed)
    double = protocols.double_teleport_resources()
    swap = protocols.swap_resources()
    worst = min(b.fidelity for b in branches)
    ok = worst >= 1 - 1e-10 and double == swap
    _emit(
        {
            "xi": _state_json(xi),
            "branches": [b.to_json() for b in branches],
            "resources": {
                "teleport": protocols.teleport_resources().__dict__,
                "double_teleport": double.__dict__,
                "distributed_swap": swap.__dict__,
                "equal": double == swap,
            },
            "min_fidelity": worst,
            "ok": ok,
        }
    )
    return OK if ok else FAIL


def cmd_ramsey(args) -> int:
    if args.action == "findings":
        lit = ramsey.literal_pi_finding(args.grid)
        light = ramsey.solve_phases("lightshift", args.grid)
        free = ramsey.solve_phases("literal", args.grid)
        _emit(
            {
                "literal_theta_pi": lit,
                "literal_theta_free": {"found": free.found, "count": len(free.solutions), "best": free.best.to_json()},
                "lightshift": {"found": light.found, "count": len(light.solutions), "best": light.best.to_json()},
            }
        )
        return OK
    theta = np.pi if args.theta == "pi" else (None if args.theta is None else float(args.theta))
    res = ramsey.solve_phases(args.model, args.grid, refine=not args.no_refine, theta=theta)
    rows = [s.to_json() for s in res.solutions]
    if args.limit is not None:
        rows = rows[: args.limit]
    _emit(
        {
            "model": res.model,
            "grid": res.grid_size,
            "theta_fixed": theta,
            "found": res.found,
            "count": len(res.solutions),
            "best": res.best.to_json(),
            "rows": rows,
        }
    )
    return OK


def _load_dots(args):
    p, d = dotsim.load_params(args.params)
    if getattr(args, "frame", None):
        from dataclasses import replace

        d = replace(d, frame=args.frame)
    return p, d


def _csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(r[k]) for k in columns})
    return buf.getvalue()


def cmd_dots(args) -> int:
    p, d = _load_dots(args)
    if args.format == "csv" and args.action != "sweep":
        raise UsageError("csv output is only available for 'dots sweep'")
    if args.action == "spectrum":
        tf = dotsim.transition_frequencies(p)
        tf["target_given_control"] = {str(k): v for k, v in tf["target_given_control"].items()}
        tf["control_given_target"] = {str(k): v for k, v in tf["control_given_target"].items()}
        tf["inv_coupling_s"] = 1 / abs(p.omega_bar) if p.omega_bar else None
        tf["dispersive_regime"] = p.dispersive_regime
        tf["energies"] = dotsim.energies(p).tolist()
        _emit(tf)
        return OK
    if args.action == "pulse":
        rec = dotsim.cnot_fidelity(p, d)
        out = rec.to_json()
        out["frame"] = d.frame
        out["conditional_phase"] = dotsim.conditional_phase(p, d.T)
        ok = rec.phase_optimized_gate_fidelity >= 0.99
        out["ok"] = ok
        _emit(out)
        return OK if ok else FAIL
    if args.action == "sweep":
        axis = dotsim.default_sweep_axis(p, args.points)
        rows = dotsim.sweep(p, d, axis)
        if args.format == "csv":
            sys.stdout.write(_csv(rows, dotsim.SWEEP_COLUMNS))
        else:
            _emit(rows)
        return OK
    return _feasibility(p, d)


def _feasibility(p, d) -> int:
    rep = dotsim.feasibility(p, d)
    _emit(rep.to_json())
    return OK if rep.passed else FAIL


def cmd_feasibility(args) -> int:
    return _feasibility(*dotsim.load_params(args.params))


def cmd_serve_referee(args) -> int:
    alpha, beta = parse_qubit(args.alpha), parse_qubit(args.beta)
    server = RefereeServer(alpha, beta, args.seed, args.host, args.port)
    log.info("referee listening on %s:%d", *server.address)
    report = server.serve(args.timeout)
    _emit({"report": report.to_json(), "transcript": [e.to_json() for e in server.referee.transcript]})
    if args.transcript_out:
        with open(args.transcript_out, "w", encoding="utf-8") as f:
            f.write(transcript_lines(server.referee.transcript))
    ok = min(report.fidelity_H0, report.fidelity_H5) >= 1 - FID_TOL
    return OK if ok else FAIL


def cmd_party(args) -> int:
    host, _, port = args.connect.rpartition(":")
    if not host or not port.isdigit():
        raise UsageError(f"--connect expects host:port, got {args.connect!r}")
    m = run_party(PartyMachine(args.role), host, int(port), args.timeout)
    _emit({"role": args.role, "results": m.results, "peer_bits": m.peer_bits})
    return OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cnotlab", description="Conditional quantum dynamics workbench built around the controlled-NOT gate."
    )
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bell", help="Bell measurement by disentangling: C12 then H on the control")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("swap3", help="state swap from three cascaded controlled-NOTs (C12 C21 C12)")
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_swap3)

    p = sub.add_parser(
        "distswap", help="swap of two distant states using two shared pairs and classical bits (Steps 1-4)"
    )
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", help="report every measurement branch (default)")
    mode.add_argument("--sample", action="store_true", help="run one seeded trajectory via the party simulator")
    p.add_argument("--alpha", default="0.6,0.8j", help="Alice's state (label or 'a,b')")
    p.add_argument("--beta", default="+i", help="Bob's state (label or 'a,b')")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transport", choices=("memory", "tcp"), default="memory")
    p.add_argument("--port", type=int, default=0, help="tcp port for the in-process referee (0 = any)")
    p.add_argument("--transcript", action="store_true", help="include the message transcript")
    p.add_argument("--calibrate", type=int, metavar="N", default=0, help="also run the Pauli calibrator on N inputs")
    p.set_defaults(func=cmd_distswap)

    p = sub.add_parser("teleport", help="teleportation baseline: one shared pair, two classical bits")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true")
    mode.add_argument("--sample", action="store_true")
    p.add_argument("--xi", default="+i")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("ramsey", help="Ramsey R1/C/R2 sequence: search pulse phases for a phased controlled-NOT")
    p.add_argument("action", choices=("solve", "findings"))
    p.add_argument("--model", choices=ramsey.MODELS, default="lightshift", help="dispersive phase model")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--theta", default=None, help="fix the dispersive phase ('pi' or radians)")
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--limit", type=int, default=None, help="cap the number of rows printed")
    p.add_argument("--json", action="store_true", help="JSON output (the only format)")
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("dots", help="dipole-coupled quantum dots: spectrum, pi pulse, sweep, feasibility")
    p.add_argument("action", choices=("spectrum", "pulse", "sweep", "feasibility"))
    p.add_argument("--params", default=None, help="JSON parameter file (SI units); default set if omitted")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--frame", choices=("full", "rwa"), default=None)
    p.add_argument("--points", type=int, default=41, help="sweep points")
    p.set_defaults(func=cmd_dots)

    p = sub.add_parser("feasibility", help="decoherence vs pulse-length timescale report for the dot gate")
    p.add_argument("--params", default=None)
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("serve-referee", help="referee holding the shared register for the distributed swap")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--alpha", default="0.6,0.8j")
    p.add_argument("--beta", default="+i")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--transcript-out", default=None, help="write the transcript as JSON lines")
    p.set_defaults(func=cmd_serve_referee)

    p = sub.add_parser("party", help="Alice or Bob in the distributed swap, talking to a referee")
    p.add_argument("--role", choices=("ALICE", "BOB"), required=True)
    p.add_argument("--connect", required=True, metavar="HOST:PORT")
    p.add_argument("--timeout", type=float, default=60.0)
    p.set_defaults(func=cmd_party)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except dotsim.ParamError as exc:
        log.error("parameter error in field '%s': %s", exc.field, exc)
        return USAGE
    except (UsageError, OSError) as exc:
        log.error("%s", exc)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
