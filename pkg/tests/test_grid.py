import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinlab.grid import (
    L2, LINF, NU_L2, ConfigurationError, NormKind, ShapeError, SpatialGrid, VelocityGrid, build_grids, norm, sobolev,
    weighted_linf, weighted_sup,
)


def test_velocity_nodes_are_symmetric_midpoints():
    vg = VelocityGrid(12, 6.0)
    assert vg.h == 1.0 and vg.weight == 1.0
    np.testing.assert_allclose(vg.nodes, -vg.nodes[::-1], atol=0)
    assert vg.nodes[0] == -5.5 and vg.nodes[-1] == 5.5


def test_ball_counts_match_direct_enumeration():
    for n, expected in [(12, 912), (16, 2176)]:
        vg = VelocityGrid(n, 6.0)
        direct = sum(1 for a in vg.nodes for b in vg.nodes for c in vg.nodes if a * a + b * b + c * c <= 36.0)
        assert int(vg.ball.sum()) == direct == expected


def test_build_grids_repeats_scalars():
    sg, vg = build_grids(n_x=8, n_v=6, dim_x=2)
    assert sg.shape == (8, 8) and sg.dim_x == 2 and vg.shape == (6, 6, 6)
    assert sg.coords[0].shape == (8, 8)
    np.testing.assert_allclose(sg.cell_volume, (2 * np.pi / 8) ** 2)


@pytest.mark.parametrize("kwargs", [dict(n_x=7), dict(n_x=2), dict(dim_x=4), dict(v_max=-1.0), dict(n_v=1)])
def test_invalid_grids_are_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        build_grids(**kwargs)


def test_wavenumbers_differentiate_exactly():
    sg = SpatialGrid((32,), (2.0 * np.pi,))
    f = np.sin(3 * sg.coords[0])
    df = np.fft.ifft(1j * sg.wavenumbers[0] * np.fft.fft(f)).real
    np.testing.assert_allclose(df, 3 * np.cos(3 * sg.coords[0]), atol=1e-12)


def test_l2_of_constant_is_volume_root():
    sg, vg = build_grids(n_x=16, n_v=8)
    f = np.ones(sg.shape + vg.shape)
    assert norm(f, L2, sg, vg) == pytest.approx(np.sqrt(2 * np.pi * 12.0**3), rel=1e-14)
    assert norm(f, LINF, sg, vg) == 1.0


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_sobolev_norm_of_single_mode(s):
    sg = SpatialGrid((32,), (2.0 * np.pi,))
    k = 3
    f = np.sin(k * sg.coords[0])
    # ||sin(kx)||_{H^s}^2 = (1 + k^2)^s pi on [0, 2 pi)
    assert norm(f, sobolev(s), sg) == pytest.approx(np.sqrt((1 + k * k) ** s * np.pi), rel=1e-13)


def test_sobolev_sums_components():
    sg = SpatialGrid((16,), (2.0 * np.pi,))
    f = np.stack([np.sin(sg.coords[0]), np.cos(sg.coords[0])])
    assert norm(f, sobolev(1), sg) == pytest.approx(np.sqrt(2 * 2 * np.pi), rel=1e-13)


def test_nu_weighted_norm_requires_nu(vgrid8):
    f = np.ones(vgrid8.shape)
    with pytest.raises(ConfigurationError):
        norm(f, NU_L2, vgrid=vgrid8)
    assert norm(f, NU_L2, vgrid=vgrid8, nu=4.0 * f) == pytest.approx(2 * norm(f, L2, vgrid=vgrid8))


def test_shape_mismatch_raises(vgrid8):
    with pytest.raises(ShapeError):
        norm(np.ones((5, 5)), L2, vgrid=vgrid8)


def test_non_finite_field_raises(vgrid8):
    f = np.ones(vgrid8.shape)
    f[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        norm(f, L2, vgrid=vgrid8)


def test_weighted_linf_matches_weight_formula(vgrid8):
    f = np.ones(vgrid8.shape)
    assert norm(f, weighted_linf(2.0), vgrid=vgrid8) == pytest.approx((1 + 3 * 5.25**2) ** 2)


def test_weighted_sup_checks_beta(vgrid8):
    f = np.ones(vgrid8.shape)
    with pytest.raises(ConfigurationError):
        weighted_sup(f, vgrid8, beta=3.4, gamma=1.0)
    assert weighted_sup(f, vgrid8, beta=3.5, gamma=1.0) > 0
    # gamma = 0 needs beta >= 4.5
    with pytest.raises(ConfigurationError):
        weighted_sup(f, vgrid8, beta=4.0, gamma=0.0)


def test_norm_kind_validation():
    with pytest.raises(ConfigurationError):
        NormKind("H7")
    with pytest.raises(ConfigurationError):
        sobolev(4)
    assert sobolev(2).label == "H2"


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.01, 100.0), seed=st.integers(0, 2**16))
def test_norms_are_homogeneous(a, seed):
    sg, vg = build_grids(n_x=8, n_v=4)
    f = np.random.default_rng(seed).standard_normal(sg.shape + vg.shape)
    for kind in (L2, LINF, sobolev(2)):
        assert norm(a * f, kind, sg, vg) == pytest.approx(a * norm(f, kind, sg, vg), rel=1e-12)
