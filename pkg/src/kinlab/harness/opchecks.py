"""Operator-level property suites; each returns records for the acceptance report."""
from __future__ import annotations

import numpy as np

from ..collision import KernelConfig, assemble_L, collide_Q, collision_frequency, measure_coercivity, split_K
from ..fluid import acoustic_energy, check_symmetrizer, default_acoustic_data, perturbed_data, solve_acoustic
from ..grid import SpatialGrid, VelocityGrid
from ..kinetic import compat_residual, fluid_jet
from ..maxwellian import FluidState, global_maxwellian, maxwellian, moments
from .records import SweepRecord


def _rec(quantity: str, norm: str, value: float, t: float = 0.0, status: str = "ok") -> SweepRecord:
    return SweepRecord(0.0, 0.0, t, quantity, norm, float(value), status)


def acoustic_energy_records(n_x: int = 64, t_end: float = 10.0, n_times: int = 101, s_max: int = 3,
                            a: float = 1.0, b: float = 1.0) -> list[SweepRecord]:
    """Worst relative drift of the H^s acoustic energy over [0, t_end] for s = 0..s_max."""
    sg = SpatialGrid((n_x,), (2.0 * np.pi,))
    init = default_acoustic_data(sg, a, b)
    states = [solve_acoustic(init, t, sg) for t in np.linspace(0.0, t_end, n_times)]
    out = []
    for s in range(s_max + 1):
        e0 = acoustic_energy(init, sg, s)
        drift = max(abs(acoustic_energy(st, sg, s) / e0 - 1.0) for st in states)
        out.append(_rec("acoustic_energy_drift", f"H{s}", drift, t_end))
    return out


def q_residual_records(levels=((12, 4, 8), (24, 4, 16)), v_max: float = 6.0, gamma: float = 1.0) -> list[SweepRecord]:
    """sup |Q(mu0, mu0)| on the ball at each (n_v, n_polar, n_azimuth)."""
    out = []
    for nv, npol, naz in levels:
        vg = VelocityGrid(nv, v_max)
        cfg = KernelConfig(gamma=gamma, n_polar=npol, n_azimuth=naz, max_nv=max(nv, 24))
        mu0 = global_maxwellian(vg)
        q = collide_Q(mu0, mu0, vg, cfg)
        out.append(_rec(f"q_residual[nv={nv},sphere={npol}x{naz}]", "Linf", np.max(np.abs(q[vg.ball]))))
    return out


def linearized_records(n_vs=(12, 16), v_max: float = 6.0, gamma: float = 1.0) -> list[SweepRecord]:
    """Asymmetry, null-space dimension, coercivity constant and conservation of the dense L."""
    out = []
    for nv in n_vs:
        vg = VelocityGrid(nv, v_max)
        cfg = KernelConfig(gamma=gamma)
        mu0 = global_maxwellian(vg)
        A = assemble_L(mu0, vg, cfg, symmetrize=False)
        asym = np.linalg.norm(A - A.T) / np.linalg.norm(A)
        diag = measure_coercivity(mu0, vg, cfg, L=0.5 * (A + A.T))
        out.append(_rec(f"l_asymmetry[nv={nv}]", "rel", asym))
        out.append(_rec(f"null_dim[nv={nv}]", "count", diag.null_dim))
        status = "ok" if diag.c0 > 0 else "failed: c0 <= 0"
        out.append(SweepRecord(0.0, 0.0, 0.0, f"c0[nv={nv}]", "value", diag.c0, status))
        out.append(_rec(f"conservation[nv={nv}]", "Linf", np.max(np.abs(diag.conservation_residuals))))
    return out


def k_cutoff_records(n_v: int = 12, v_max: float = 6.0, ms=(0.25, 0.5, 1.0), gammas=(1.0, 0.0),
                     n_fields: int = 8, seed: int = 0, T_M: float = 0.75) -> list[SweepRecord]:
    """max over seeded random sign fields g of ||K^m g||_inf / ||nu||_inf around mu0."""
    vg = VelocityGrid(n_v, v_max)
    rng = np.random.default_rng(seed)
    G = rng.choice([-1.0, 1.0], size=(n_fields,) + vg.shape)
    mu = FluidState.constant(())
    out = []
    for gamma in gammas:
        cfg = KernelConfig(gamma=gamma)
        nu = float(np.max(collision_frequency(global_maxwellian(vg), vg, cfg)[vg.ball]))
        for m in ms:
            km, _ = split_K(G, mu, T_M, m, vg, cfg, complement=False)
            out.append(_rec(f"k_cutoff[gamma={gamma:g},m={m:g}]", "nu_Linf", np.max(np.abs(km)) / nu))
    return out


def _steepest_node(jet) -> tuple[int, ...]:
    g = np.sum(jet.grad_rho**2, axis=0) + np.sum(jet.grad_T**2, axis=0)
    return tuple(int(i) for i in np.unravel_index(np.argmax(g), g.shape))


def compat_records(n_v: int = 16, v_max: float = 6.0, n_x: int = 64, delta: float = 0.1) -> list[SweepRecord]:
    """Solvability residual for fluid data with Euler time derivatives and for a steady non-Euler field."""
    sg, vg = SpatialGrid((n_x,), (2.0 * np.pi,)), VelocityGrid(n_v, v_max)
    state = perturbed_data(default_acoustic_data(sg), delta)
    jet = fluid_jet(state, sg)
    node = _steepest_node(jet)
    good = compat_residual(jet.at(node), vg, vg.ball)

    x = sg.coords[0]
    still = FluidState(1.0 + delta * np.sin(x), np.zeros((3,) + x.shape), np.ones_like(x))
    zero = FluidState(np.zeros_like(x), np.zeros((3,) + x.shape), np.zeros_like(x))
    bad_jet = fluid_jet(still, sg, time_derivative=zero)
    bad = compat_residual(bad_jet.at(_steepest_node(bad_jet)), vg, vg.ball)
    return [_rec("compat_residual[field=euler]", "rel", good), _rec("compat_residual[field=non-euler]", "rel", bad)]


def fluid_property_records(n_x: int = 64, n_v: int = 24, v_max: float = 6.0, delta: float = 0.1) -> list[SweepRecord]:
    """Symmetrizer definiteness and Maxwellian moment accuracy on the default data."""
    sg, vg = SpatialGrid((n_x,), (2.0 * np.pi,)), VelocityGrid(n_v, v_max)
    state = perturbed_data(default_acoustic_data(sg), delta)
    rep = check_symmetrizer(state)
    status = "ok" if rep.A0_spd and rep.Ai_symmetric else "failed: symmetrizer"
    mass, mom, energy = moments(maxwellian(state, vg), vg)
    err = max(np.max(np.abs(mass - state.rho)), np.max(np.abs(mom - state.rho * state.u)))
    return [SweepRecord(0.0, 0.0, 0.0, "symmetrizer_min_eig", "value", rep.min_A0_eig, status),
            _rec("maxwellian_moment_error", "Linf", err)]


def operator_records(quick: bool = False) -> list[SweepRecord]:
    """Everything verify-ops runs; ``quick`` keeps the coarse levels only."""
    levels = ((8, 4, 8), (12, 4, 8)) if quick else ((12, 4, 8), (24, 4, 16))
    n_vs = (8, 12) if quick else (12, 16)
    return (acoustic_energy_records() + q_residual_records(levels) + linearized_records(n_vs)
            + k_cutoff_records(n_v=8 if quick else 12) + compat_records(n_v=12 if quick else 16)
            + fluid_property_records())
