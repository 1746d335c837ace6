"""Sweep orchestration over (epsilon, delta)."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..fluid import EulerRunConfig, default_acoustic_data, linearization_defect, perturbed_data, solve_acoustic, solve_euler
from ..grid import L2, LINF, build_grids, norm
from ..kinetic import Distribution, ScalingConfig, remainder_diagnostics, run_kinetic
from ..maxwellian import check_bounds, expansion_defect, global_maxwellian, limit_profile_G, maxwellian
from .config import SweepConfig
from .records import SweepRecord, write_csv
from .snapshots import write_snapshot

_NORMS = {"L2": L2, "Linf": LINF}


def expected_series(cfg: SweepConfig) -> list[tuple[str, str]]:
    """(quantity, norm) pairs emitted per sampled time."""
    norms = [n for n in cfg.norms if n in _NORMS]
    if cfg.kind == "expansion":
        return [("expansion_defect", n) for n in norms]
    if cfg.kind == "linearization":
        return [("linearization_defect", "H2")]
    if cfg.kind == "euler-limit":
        return ([("euler_defect", n) for n in norms]
                + [(f"remainder_order{k}", n) for k in (0, 1) for n in ("f_l2", "h_winf")]
                + [("fluctuation_consistency", "L2"), ("mass_drift", "rel")])
    return [("acoustic_defect", n) for n in norms] + [("mass_drift", "rel")]


def _failed(cfg: SweepConfig, eps: float, delta: float, reason: str) -> list[SweepRecord]:
    reason = " ".join(str(reason).split()).replace(",", ";")
    return [SweepRecord(eps, delta, t, q, n, float("nan"), f"failed: {reason}")
            for t in cfg.sample_times for q, n in expected_series(cfg)]


def run_pair(cfg: SweepConfig, eps: float, delta: float) -> list[SweepRecord]:
    """All records of one (epsilon, delta) run; failures become failed rows."""
    try:
        return _run_pair(cfg, eps, delta)
    except (ValueError, ArithmeticError) as exc:
        return _failed(cfg, eps, delta, f"{type(exc).__name__}: {exc}")


def _run_pair(cfg: SweepConfig, eps: float, delta: float) -> list[SweepRecord]:
    sg, vg = build_grids(n_x=cfg.n_x, n_v=cfg.n_v, v_max=cfg.v_max, dim_x=cfg.dim_x)
    acoustic0 = default_acoustic_data(sg, cfg.a, cfg.b)
    init = perturbed_data(acoustic0, delta)
    init.validate()
    times = sorted(cfg.sample_times)
    euler = solve_euler(init, EulerRunConfig(delta=delta, tau=cfg.tau), sg, sample_times=times)
    if not euler.ok:
        return _failed(cfg, eps, delta, f"euler {euler.status} at t={euler.reached_time:.6g}")

    status = "ok"
    t_min = min(float(np.min(s.T)) for s in euler.states)
    T_M = 0.75 * min(t_min, float(np.min(init.T)))
    for state in (init, *euler.states):
        bounds = check_bounds(state, T_M, vg)
        if not bounds.passed:
            if cfg.admissibility == "strict":
                return _failed(cfg, eps, delta, f"inadmissible: {bounds.violation}")
            status = "flagged"
            break

    out: list[SweepRecord] = []
    series = expected_series(cfg)
    if cfg.kind in ("expansion", "linearization"):
        for t in times:
            ac, eu = solve_acoustic(acoustic0, t, sg), euler.at(t)
            if cfg.kind == "expansion":
                sup, l2 = expansion_defect(delta, eu, ac, sg, vg)
                vals = {"Linf": sup, "L2": l2}
                out += [SweepRecord(eps, delta, t, q, n, vals[n], status) for q, n in series]
            else:
                out.append(SweepRecord(eps, delta, t, "linearization_defect", "H2",
                                       linearization_defect(eu, ac, delta, sg, 2), status))
        return out

    scaling = ScalingConfig(epsilon=eps, delta=delta, backend=cfg.backend, scheme=cfg.scheme, gamma=cfg.gamma,
                            rate_model=cfg.rate_model, nu0=cfg.nu0)
    F0 = Distribution(maxwellian(init, vg), 0.0)
    run = run_kinetic(F0, cfg.tau, scaling, sg, vg, sample_times=times, dt=cfg.dt)
    log = run.conservation
    mu0 = global_maxwellian(vg)
    for snap in run.snapshots:
        t = snap.t
        if cfg.snapshot_dir:
            name = f"{cfg.kind}_eps{eps:.6g}_delta{delta:.6g}_t{t:.6g}.bin"
            write_snapshot(f"{cfg.snapshot_dir}/{name}", snap.values, t, "F", n_x=cfg.n_x, n_v=cfg.n_v,
                           v_max=cfg.v_max, dim_x=cfg.dim_x, epsilon="%.17g" % eps, delta="%.17g" % delta)
        row = int(np.argmin(np.abs(log[:, 0] - t)))
        drift = abs(log[row, 1] - log[0, 1]) / abs(log[0, 1])
        eu = euler.at(t)
        if cfg.kind == "euler-limit":
            mu = maxwellian(eu, vg)
            d = snap.values - mu
            vals = {("euler_defect", n): norm(d, _NORMS[n], sg, vg) for n in _NORMS}
            for k in (0, 1):
                rd = remainder_diagnostics(snap, eu, k, scaling, sg, vg, T_M=T_M)
                vals[(f"remainder_order{k}", "f_l2")] = rd.f_l2
                vals[(f"remainder_order{k}", "h_winf")] = rd.h_winf
            fluct = (snap.values - mu0) / delta - (mu - mu0) / delta
            vals[("fluctuation_consistency", "L2")] = norm(fluct, L2, sg, vg)
        else:
            G = limit_profile_G(solve_acoustic(acoustic0, t, sg), vg)
            d = (snap.values - mu0) / delta - G
            vals = {("acoustic_defect", n): norm(d, _NORMS[n], sg, vg) for n in _NORMS}
        vals[("mass_drift", "rel")] = drift
        out += [SweepRecord(eps, delta, t, q, n, float(vals[(q, n)]), status) for q, n in series]
    return out


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Records for every (epsilon, delta) in config order, regardless of worker completion order."""
    pairs = cfg.pairs()
    if cfg.workers > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(pairs))) as pool:
            chunks = list(pool.map(run_pair, [cfg] * len(pairs), *zip(*pairs)))
    else:
        chunks = [run_pair(cfg, e, d) for e, d in pairs]
    records = [r for chunk in chunks for r in chunk]
    if cfg.output:
        write_csv(records, cfg.output)
    return records
