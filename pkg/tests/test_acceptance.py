"""Acceptance criteria at their stated parameters and tolerances.

Every test prints one PASS/FAIL line for its criterion, including the
wall-clock time against the stated budget. The slow sweeps run once per
session through module-scoped fixtures.
"""
import time

import numpy as np
import pytest

from kinlab.harness import criterion_configs, evaluate, fit_records, run_sweep
from kinlab.harness.opchecks import (
    acoustic_energy_records, compat_records, k_cutoff_records, linearized_records, q_residual_records,
)


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def verdict(criterion, records, elapsed, budget, capsys, extra=()):
    """Print the criterion line and return whether it passed, runtime and extra checks included."""
    v = evaluate(criterion, records)
    fine = [ok for ok, _ in extra]
    passed = v.status == "pass" and elapsed < budget and all(fine)
    notes = [f"runtime={elapsed:.1f}s/{budget:.0f}s"] + [msg for ok, msg in extra if not ok]
    with capsys.disabled():
        print(f"\n{'PASS' if passed else 'FAIL'} criterion {criterion}: {v.line()} ({'; '.join(notes)})")
    return passed, v


def sweep_all(name):
    return [r for cfg in criterion_configs(name) for r in run_sweep(cfg)]


@pytest.fixture(scope="module")
def euler_sweep():
    return timed(lambda: sweep_all("euler-limit"))


@pytest.fixture(scope="module")
def acoustic_sweep():
    return timed(lambda: sweep_all("acoustic-limit"))


def test_criterion_1_acoustic_energy(capsys):
    recs, dt = timed(acoustic_energy_records)
    ok, v = verdict("1", recs, dt, 5, capsys)
    assert ok, v.line()


def test_criterion_2_expansion_rate(capsys):
    recs, dt = timed(lambda: sweep_all("expansion"))
    ok, v = verdict("2", recs, dt, 120, capsys)
    assert ok, v.line()


def test_criterion_3_linearization_rate(capsys):
    recs, dt = timed(lambda: sweep_all("linearization"))
    ok, v = verdict("3", recs, dt, 120, capsys)
    assert ok, v.line()


def test_criterion_4_collision_operator(capsys):
    recs, dt = timed(lambda: q_residual_records() + linearized_records())
    ok, v = verdict("4", recs, dt, 600, capsys)
    assert ok, v.line()


def test_criterion_5_cutoff_scaling(capsys):
    recs, dt = timed(k_cutoff_records)
    ok, v = verdict("5", recs, dt, 300, capsys)
    assert ok, v.line()


def test_criterion_6_euler_limit(euler_sweep, capsys):
    recs, dt = euler_sweep
    ok_rows = [r for r in recs if r.usable]
    drift = max(r.value for r in ok_rows if r.quantity == "mass_drift")
    order0 = {r.epsilon: r.value for r in ok_rows if r.quantity == "remainder_order0" and r.norm == "f_l2"}
    order1 = {r.epsilon: r.value for r in ok_rows if r.quantity == "remainder_order1" and r.norm == "f_l2"}
    consistency = fit_records(recs, "fluctuation_consistency", "L2").slope
    extra = [
        (drift <= 1e-10, f"mass drift {drift:.3g} > 1e-10"),
        (all(order1[e] <= order0[e] for e in order0), "order-1 remainder exceeds order 0"),
        (consistency >= 0.8, f"fluctuation consistency slope {consistency:.3g} < 0.8"),
    ]
    ok, v = verdict("6", recs, dt, 1800, capsys, extra)
    assert ok, v.line()


def test_criterion_7a_coupled_acoustic_limit(acoustic_sweep, capsys):
    recs, dt = acoustic_sweep
    ok, v = verdict("7a", recs, dt, 3600, capsys)
    assert ok, v.line()


def test_criterion_7b_fixed_epsilon_floor(acoustic_sweep, capsys):
    recs, dt = acoustic_sweep
    ok, v = verdict("7b", recs, dt, 3600, capsys)
    assert ok, v.line()


def test_criterion_8_hilbert_solvability(capsys):
    recs, dt = timed(compat_records)
    ok, v = verdict("8", recs, dt, 300, capsys)
    assert ok, v.line()
