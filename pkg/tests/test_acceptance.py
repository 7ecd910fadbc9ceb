"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from cnotlab import dotsim as ds
from cnotlab import protocols as pr
from cnotlab import ramsey as rm
from cnotlab.distsim import decode, run_distributed
from cnotlab.gatelib import BELL_KINDS, C12, C21, H, SWAP, X, bell_measure, bell_pair, conjugate_basis, controlled_u, phased_cnot, swap3
from cnotlab.qstate import apply, prepare, random_qubit

README = Path(__file__).resolve().parents[1] / "README.md"
RESULTS: dict[int, tuple[bool, str]] = {}


def _report(n: int, ok: bool, detail: str, capsys=None):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS[n] = (ok, line)
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def crit1():
    t0 = time.perf_counter()
    errs = {
        "cnot^2=I": np.abs(C12 @ C12 - np.eye(4)).max(),
        "cu([I,X])=cnot": np.abs(controlled_u([np.eye(2), X]).matrix() - C12).max(),
        "HH C12 HH=C21": np.abs(conjugate_basis(C12, H) - C21).max(),
        "swap3=SWAP": np.abs(swap3() - SWAP).max(),
    }
    dt = time.perf_counter() - t0
    ok = max(errs.values()) <= 1e-10 and dt < 1.0
    return ok, f"gate identities max err {max(errs.values()):.1e} in {dt*1e3:.1f} ms"


def crit2():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        a, b = random_qubit(rng)
        out = apply(prepare([[a, b], "0"]), C12, [0, 1]).amps
        worst = max(worst, np.abs(out - [a, 0, 0, b]).max())
    bell = min(bell_measure(bell_pair(k))[k] for k in BELL_KINDS)
    ok = worst <= 1e-12 and abs(bell - 1) <= 1e-10
    return ok, f"measurement gate err {worst:.1e}; min Bell label probability {bell:.12f}"


def crit3():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst, worst_sum, counts = 1.0, 0.0, set()
    for _ in range(100):
        a, b = random_qubit(rng), random_qubit(rng)
        reps = pr.distributed_swap(a, b)
        counts.add(len(reps))
        worst_sum = max(worst_sum, abs(sum(r.probability for r in reps) - 1))
        worst = min(worst, min(min(r.fidelity_H0, r.fidelity_H5) for r in reps))
    res = pr.swap_resources()
    cal = pr.calibrate_corrections(20, seed=3)
    dt = time.perf_counter() - t0
    text = README.read_text(encoding="utf-8") if README.exists() else ""
    recorded = "calibration was not needed" in text.lower()
    ok = (
        counts == {16}
        and worst_sum <= 1e-9
        and worst >= 1 - 1e-9
        and (res.bits_a_to_b, res.bits_b_to_a) == (2, 2)
        and cal.identity_only
        and recorded
        and dt < 10
    )
    return ok, (
        f"16 branches, |sum p - 1| {worst_sum:.1e}, min fidelity {worst:.12f} (literal corrections), "
        f"bits {res.bits_a_to_b}+{res.bits_b_to_a}, calibrator identity-only={cal.identity_only}, "
        f"README records finding={recorded}, {dt:.2f} s"
    )


def crit4():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        br = pr.teleport(random_qubit(rng))
        assert len(br) == 4
        worst = max(worst, max(abs(b.fidelity - 1) for b in br))
    d, s = pr.double_teleport_resources(), pr.swap_resources()
    ok = worst <= 1e-10 and d == s and (d.pairs, d.bits) == (2, 4)
    return ok, f"teleport max |F-1| {worst:.1e}; double teleport {d} == distributed swap {s}"


def crit5():
    rng = np.random.default_rng(5)
    a, b = random_qubit(rng), random_qubit(rng)
    bad = []
    only_bits = True
    for seed in range(20):
        local = pr.distributed_swap(a, b, "sample", seed=seed)[0]
        mem, _ = run_distributed(a, b, "memory", seed)
        tcp, tr = run_distributed(a, b, "tcp", seed)
        for other in (local, mem):
            if (
                tcp.branch_id != other.branch_id
                or abs(tcp.fidelity_H0 - other.fidelity_H0) > 1e-12
                or abs(tcp.fidelity_H5 - other.fidelity_H5) > 1e-12
            ):
                bad.append(seed)
        for e in tr:
            if e.dir in ("A→B", "B→A") and decode(e.raw + "\n").verb != "BIT":
                only_bits = False
    ok = not bad and only_bits
    return ok, f"20 seeds tcp vs in-process: mismatches {sorted(set(bad))}; party-to-party traffic BIT only={only_bits}"


def crit6():
    t0 = time.perf_counter()
    lit = rm.literal_pi_finding(64)
    light = rm.solve_phases("lightshift", 64)
    dt = time.perf_counter() - t0
    worst = 0.0
    for s in light.solutions:
        u = rm.compose_sequence(s.params)
        v = phased_cnot(s.phases)
        k = np.vdot(v.ravel(), u.ravel())
        worst = max(worst, np.abs(v * k / abs(k) - u).max())
    ok = (
        lit["max_block_phase_mismatch"] <= 1e-10
        and not lit["any_entangling"]
        and light.found
        and light.best.residual < 1e-8
        and worst <= 1e-7
        and dt < 60
    )
    return ok, (
        f"literal theta=pi best residual {lit['best_residual']:.4f}, non-entangling "
        f"(block mismatch {lit['max_block_phase_mismatch']:.1e}); lightshift {len(light.solutions)} "
        f"solutions, best residual {light.best.residual:.1e}, reconstruction err {worst:.1e}; {dt:.1f} s"
    )


def crit7():
    p, _ = ds.default_params()
    inv = 1 / abs(p.omega_bar)
    tf = ds.transition_frequencies(p)
    ok = (
        1e-13 <= inv <= 1e-11
        and abs(tf["target_splitting"] - 4 * abs(p.omega_bar)) <= 1e-9 * abs(p.omega_bar)
        and tf["single_sided_splitting"] != tf["target_splitting"]
    )
    return ok, (
        f"1/|wbar| = {inv:.3e} s; splitting {tf['target_splitting']:.4e} = "
        f"{tf['splitting_over_omega_bar']:.6f} |wbar| (single-sided reading {tf['single_sided_splitting']:.4e})"
    )


def crit8():
    p, d = ds.default_params()
    worst = 0.0
    for delta in (0.0, 2e10, -5e10, 4 * abs(p.omega_bar)):
        for T in (1e-12, 3e-11, d.T):
            dd = replace(d, omega=ds.target_resonance(p, 1) - delta, T=T)
            got = abs(ds.propagator(p, dd)[3, 2]) ** 2
            worst = max(worst, abs(got - ds.rabi_population(d.Omega / 2, delta, T)))
    t0 = time.perf_counter()
    full = ds.propagator(p, replace(d, frame="full"))
    dt = time.perf_counter() - t0
    cross = np.abs(np.abs(full) ** 2 - np.abs(ds.propagator(p, d)) ** 2).max()
    fid = ds.cnot_fidelity(p, d)
    ok = (
        worst <= 1e-10
        and d.Omega <= 0.01 * p.omega2
        and cross <= 0.02
        and fid.phase_optimized_gate_fidelity >= 0.99
        and dt < 120
    )
    return ok, (
        f"rwa vs Rabi {worst:.1e}; full vs rwa {cross:.1e} (full run {dt:.1f} s); "
        f"phase-optimized F {fid.phase_optimized_gate_fidelity:.6f} (raw {fid.raw_gate_fidelity:.4f})"
    )


def crit9():
    p, d = ds.default_params()
    q = ds.feasibility(p, d).to_json()["quoted"]
    quoted = [
        q["cavity_resonant_frequency_hz"] == 2e10,
        q["cavity_interaction_time_s"] == 3e-5,
        q["cavity_field_lifetime_s"] == 0.5,
        q["dot_decoherence_qed_s"] == 1e-6,
        q["dot_decoherence_phonon_s"] == 1e-9,
        q["dot_inv_coupling_s"] == 1e-12,
    ]
    neg = ds.feasibility(p, replace(d, T=1e-13))
    good = ds.feasibility(p, d)
    ok = all(quoted) and neg.decoherence_ok and not neg.selectivity_ok and not neg.passed and good.passed
    return ok, (
        f"six quoted timescales echoed={all(quoted)}; T=1e-13 s: decoherence ok={neg.decoherence_ok}, "
        f"selectivity ok={neg.selectivity_ok}, pass={neg.passed}; default pass={good.passed}"
    )


CRITERIA = [crit1, crit2, crit3, crit4, crit5, crit6, crit7, crit8, crit9]


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    assert _report(n, ok, detail, capsys), detail


if __name__ == "__main__":
    import sys

    results = [_report(n, *CRITERIA[n - 1]()) for n in range(1, 10)]
    sys.exit(0 if all(results) else 1)
