import numpy as np
import pytest
from scipy.special import erf

from kinlab.fluid import default_acoustic_data, difference_fields, perturbed_data, solve_acoustic, solve_euler, EulerRunConfig
from kinlab.grid import ConfigurationError, SpatialGrid, VelocityGrid
from kinlab.maxwellian import (
    AcousticState, DifferenceState, DomainError, FluidState, check_bounds, expansion_defect, fluid_from_moments,
    global_maxwellian, interpolated_fluid, limit_profile_G, maxwellian, maxwellian_point, moments, mu_z_jet,
)


def _acoustic(sg, a=1.0, b=1.0):
    return default_acoustic_data(sg, a, b)


def _zero_diff(sg):
    z = np.zeros(sg.shape)
    return DifferenceState(z, np.zeros((3,) + sg.shape), z)


def _axis_moments(u, T, L, k_max=4):
    """Exact int_{-L}^{L} v^k N(v; u, T) dv for k = 0..k_max.

    Integration by parts gives I_k = u I_{k-1} + (k-1) T I_{k-2} + T (a^{k-1} p(a) - b^{k-1} p(b)).
    """
    p = lambda v: np.exp(-(v - u) ** 2 / (2 * T)) / np.sqrt(2 * np.pi * T)
    a, b = -L, L
    out = [0.5 * (erf((b - u) / np.sqrt(2 * T)) - erf((a - u) / np.sqrt(2 * T)))]
    for k in range(1, k_max + 1):
        prev2 = out[k - 2] if k >= 2 else 0.0
        out.append(u * out[k - 1] + (k - 1) * T * prev2 + T * (a ** (k - 1) * p(a) - b ** (k - 1) * p(b)))
    return np.array(out)


def _box_moments(rho, u, T, L):
    """Exact moments of a Maxwellian restricted to the cube [-L, L]^3, from separable 1-D integrals."""
    m = [_axis_moments(u[i], T, L, 2) for i in range(3)]
    mass = rho * m[0][0] * m[1][0] * m[2][0]
    mom = rho * np.array([m[i][1] * np.prod([m[j][0] for j in range(3) if j != i]) for i in range(3)])
    energy = 0.5 * rho * sum(m[i][2] * np.prod([m[j][0] for j in range(3) if j != i]) for i in range(3))
    return mass, mom, energy


def _midpoint_edge_bound(f_prime_jump, h, L, scale=1.0):
    """Leading midpoint-rule error h^2/24 [f'] on [-L, L], with a 2x safety factor."""
    return 2.0 * scale * h * h / 24.0 * abs(f_prime_jump)


def test_reference_value_at_origin():
    vg = VelocityGrid(13, 6.0)  # odd n_v puts a node at v = 0
    mu0 = global_maxwellian(vg)
    assert mu0[6, 6, 6] == pytest.approx((2 * np.pi) ** -1.5, rel=1e-15)
    assert mu0[6, 6, 6] == pytest.approx(0.06349, abs=5e-6)


def test_maxwellian_matches_pointwise_formula(vgrid8):
    rho, u, T = 1.3, np.array([0.2, -0.1, 0.4]), 0.8
    F = maxwellian_point(rho, u, T, vgrid8)
    v = np.stack(vgrid8.mesh)
    expected = rho / (2 * np.pi * T) ** 1.5 * np.exp(-np.sum((v - u[:, None, None, None]) ** 2, axis=0) / (2 * T))
    np.testing.assert_allclose(F, expected, rtol=1e-14)
    assert np.all(F > 0)


def test_reference_moments_against_double_resolution_oracle():
    coarse, fine = VelocityGrid(32, 6.0), VelocityGrid(64, 6.0)
    mc, pc, ec = moments(global_maxwellian(coarse), coarse)
    mf, pf, ef = moments(global_maxwellian(fine), fine)
    assert abs(mc - mf) <= 1e-8 and np.max(np.abs(pc - pf)) <= 1e-8 and abs(ec - ef) <= 1e-8


def test_reference_moments_against_box_exact_values_within_error_bounds():
    vg = VelocityGrid(32, 6.0)
    mass, mom, energy = moments(global_maxwellian(vg), vg)
    bm, _, be = _box_moments(1.0, np.zeros(3), 1.0, 6.0)
    phi = lambda v: np.exp(-v * v / 2) / np.sqrt(2 * np.pi)
    L = 6.0
    # truncation tail of the energy, in closed form: 1.5 - be
    tail = 1.5 - be
    assert 0 < tail < 3 * (L * phi(L) + 0.5 * L**3 * phi(L))
    # midpoint error: the integrands' derivative jumps at +-L (phi' and (v^2 phi)')
    jump0 = 2 * L * phi(L)
    jump2 = 2 * (L**3 - 2 * L) * phi(L)
    assert abs(mass - bm) <= _midpoint_edge_bound(jump0, vg.h, L, scale=3.0)
    assert abs(energy - be) <= _midpoint_edge_bound(jump2, vg.h, L, scale=1.5) + _midpoint_edge_bound(jump0, vg.h, L, 3.0)
    assert np.max(np.abs(mom)) <= 1e-15


def test_moment_error_shrinks_under_refinement():
    rho, u, T = 1.1, np.array([0.3, 0.0, -0.2]), 0.9
    errs = []
    for n in (6, 12):
        vg = VelocityGrid(n, 6.0)
        got = moments(maxwellian_point(rho, u, T, vg), vg)
        exact = _box_moments(rho, u, T, 6.0)
        errs.append(max(abs(got[0] - exact[0]), np.max(np.abs(got[1] - exact[1])), abs(got[2] - exact[2])))
    assert errs[0] / errs[1] >= 4.0


def test_moments_recover_parameters(vgrid24):
    state = FluidState(np.array([1.2, 0.9]), np.array([[0.1, -0.2], [0.0, 0.3], [0.05, 0.0]]), np.array([1.1, 0.95]))
    back = fluid_from_moments(maxwellian(state, vgrid24), vgrid24)
    np.testing.assert_allclose(back.rho, state.rho, atol=1e-8)
    np.testing.assert_allclose(back.u, state.u, atol=1e-6)
    np.testing.assert_allclose(back.T, state.T, atol=1e-6)


def test_centred_maxwellian_is_even(vgrid12):
    F = maxwellian_point(2.0, (0, 0, 0), 0.7, vgrid12)
    assert np.array_equal(F, F[::-1, ::-1, ::-1])


def test_nonpositive_fields_name_the_node(vgrid8):
    T = np.ones(5)
    T[3] = -0.1
    state = FluidState(np.ones(5), np.zeros((3, 5)), T)
    with pytest.raises(DomainError, match=r"T <= 0 at node \(3,\)"):
        maxwellian(state, vgrid8)


def test_fluid_state_shape_check():
    with pytest.raises(ConfigurationError):
        FluidState(np.ones(4), np.zeros((3, 5)), np.ones(4))


def test_check_bounds_examples(vgrid12, sgrid64):
    ok = check_bounds(FluidState.constant((4,)), 0.75, vgrid12)
    assert ok.passed and 0.5 < ok.alpha < 1
    bad = check_bounds(FluidState.constant((4,)), 1.0, vgrid12)
    assert not bad.passed and "T_M" in bad.violation and "node" in bad.violation
    state = perturbed_data(_acoustic(sgrid64), 0.1)
    b = check_bounds(state, 0.8, vgrid12)
    assert b.passed and np.isfinite(b.c1) and np.isfinite(b.c2)
    mu = maxwellian(state, vgrid12)
    assert np.all(b.c1 * global_maxwellian(vgrid12, 0.8) <= mu * (1 + 1e-12))
    assert np.all(mu <= b.c2 * global_maxwellian(vgrid12, 0.8) ** b.alpha * (1 + 1e-12))


def test_check_bounds_c2_against_analytic_supremum():
    # For mu = mu(1, 0, T) and mu_M(T_M), mu / mu_M^alpha is maximal at v = 0.
    vg = VelocityGrid(13, 6.0)
    T, T_M = 1.0, 0.75
    b = check_bounds(FluidState.constant((), T=T), T_M, vg)
    expected = (2 * np.pi * T) ** -1.5 / (2 * np.pi * T_M) ** (-1.5 * b.alpha)
    assert b.c2 == pytest.approx(expected, rel=1e-12)


def test_upper_temperature_violation(vgrid8):
    state = FluidState(np.ones(3), np.zeros((3, 3)), np.array([1.0, 1.2, 1.6]))
    b = check_bounds(state, 0.75, vgrid8)
    assert not b.passed and "(2,)" in b.violation


def test_limit_profile_zero_and_moments(sgrid16, vgrid24):
    z = np.zeros(sgrid16.shape)
    assert np.all(limit_profile_G(AcousticState(z, np.zeros((3,) + z.shape), z), vgrid24) == 0)
    ac = _acoustic(sgrid16)
    G = limit_profile_G(ac, vgrid24)
    w = vgrid24.weight
    v = vgrid24.mesh
    np.testing.assert_allclose(G.sum(axis=(1, 2, 3)) * w, ac.sigma, atol=1e-8)
    for i in range(3):
        np.testing.assert_allclose((G * v[i]).sum(axis=(1, 2, 3)) * w, ac.u[i], atol=1e-8)
    energy = (G * 0.5 * (vgrid24.speed2 - 3)).sum(axis=(1, 2, 3)) * w
    np.testing.assert_allclose(energy, 1.5 * ac.theta, atol=1e-8)


def test_limit_profile_theta_moment_against_box_exact_oracle(sgrid16, vgrid24):
    ac = _acoustic(sgrid16)
    G = limit_profile_G(ac, vgrid24)
    energy = (G * 0.5 * (vgrid24.speed2 - 3)).sum(axis=(1, 2, 3)) * vgrid24.weight
    # int ((|v|^2-3)/2)^k mu0 over the box, k = 1, 2, from 1-D moments of N(0, 1) on [-6, 6]
    m = _axis_moments(0.0, 1.0, 6.0)
    m0, m2, m4 = m[0], m[2], m[4]
    q1 = 0.5 * (3 * m2 * m0**2 - 3 * m0**3)
    s4 = 3 * m4 * m0**2 + 6 * m2**2 * m0
    q2 = 0.25 * (s4 - 6 * 3 * m2 * m0**2 + 9 * m0**3)
    np.testing.assert_allclose(energy, q1 * ac.sigma + q2 * ac.theta, atol=5e-7)
    assert 0 < 1.5 - q2 < 5e-6 and abs(q1) < 1e-6


def test_theta_coefficient_vanishes_on_sphere():
    z = np.zeros(1)
    ac = AcousticState(z, np.zeros((3, 1)), np.ones(1))
    # |v|^2 = 3 at v = (1, 1, 1): nodes at +-1 on the grid h = 2 with v_max = 6? use n_v = 6 -> nodes +-1, +-3, +-5.
    vg = VelocityGrid(6, 6.0)
    G = limit_profile_G(ac, vg)
    i = list(vg.nodes).index(1.0)
    assert G[0, i, i, i] == 0.0


def test_jet_at_zero_is_reference_and_profile(sgrid16, vgrid12):
    ac = _acoustic(sgrid16)
    diff = DifferenceState(0.3 * ac.sigma, 0.2 * ac.u, -0.1 * ac.theta)
    mu, d1, _ = mu_z_jet(ac, diff, 0.0, vgrid12)
    np.testing.assert_array_equal(mu, np.broadcast_to(global_maxwellian(vgrid12), mu.shape))
    np.testing.assert_allclose(d1, limit_profile_G(ac, vgrid12), atol=1e-12)


@pytest.mark.parametrize("z", [0.0, 0.07])
def test_jet_matches_finite_differences(sgrid16, vgrid12, z):
    ac = _acoustic(sgrid16)
    diff = DifferenceState(0.3 * ac.sigma, 0.2 * ac.u, -0.1 * ac.theta)
    _, d1, d2 = mu_z_jet(ac, diff, z, vgrid12)
    errs = []
    for h in (1e-3, 5e-4):
        mp, _, _ = mu_z_jet(ac, diff, z + h, vgrid12)
        mm, _, _ = mu_z_jet(ac, diff, z - h, vgrid12)
        m0, _, _ = mu_z_jet(ac, diff, z, vgrid12)
        fd1 = (mp - mm) / (2 * h)
        fd2 = (mp - 2 * m0 + mm) / h**2
        errs.append((np.max(np.abs(fd1 - d1)), np.max(np.abs(fd2 - d2))))
    # both differences are O(h^2): halving h cuts the error about 4x
    assert errs[0][0] / errs[1][0] > 3.5
    assert errs[1][1] < 1e-5


def test_jet_reproduces_perturbed_maxwellian(sgrid16, vgrid12):
    ac = _acoustic(sgrid16)
    delta = 0.1
    euler = solve_euler(perturbed_data(ac, delta), EulerRunConfig(delta=delta), sgrid16, sample_times=[0.5]).at(0.5)
    lin = solve_acoustic(ac, 0.5, sgrid16)
    diff = difference_fields(euler, lin, delta)
    mu, _, _ = mu_z_jet(lin, diff, delta, vgrid12)
    np.testing.assert_allclose(mu, maxwellian(euler, vgrid12), rtol=1e-12, atol=1e-15)
    s = interpolated_fluid(lin, diff, delta)
    np.testing.assert_allclose(s.rho, euler.rho, atol=1e-13)


def test_jet_rejects_nonpositive_density(vgrid8):
    z = np.ones(2)
    ac = AcousticState(-20 * z, np.zeros((3, 2)), z * 0)
    with pytest.raises(DomainError):
        mu_z_jet(ac, DifferenceState(0 * z, np.zeros((3, 2)), 0 * z), 0.1, vgrid8)


def test_expansion_defect_at_initial_time_matches_taylor_remainder(sgrid16, vgrid12):
    ac = _acoustic(sgrid16)
    delta = 0.05
    init = perturbed_data(ac, delta)
    sup, l2 = expansion_defect(delta, init, ac, sgrid16, vgrid12)
    # pointwise remainder mu(delta) - mu(0) - delta mu'(0) = integral of (delta - z) mu''(z)
    zs, ws = np.polynomial.legendre.leggauss(12)
    zs, ws = 0.5 * delta * (zs + 1), 0.5 * delta * ws
    rem = sum(w * (delta - z) * mu_z_jet(ac, _zero_diff(sgrid16), z, vgrid12)[2] for z, w in zip(zs, ws))
    assert sup == pytest.approx(np.max(np.abs(rem)), rel=1e-9)


def test_expansion_defect_rejects_zero_delta(sgrid16, vgrid8):
    ac = _acoustic(sgrid16)
    with pytest.raises(ConfigurationError):
        expansion_defect(0.0, perturbed_data(ac, 0.1), ac, sgrid16, vgrid8)
