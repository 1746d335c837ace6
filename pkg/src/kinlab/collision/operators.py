"""Full Boltzmann collision operator and its linearisation on the velocity grid.

The operator acts on nodes inside the ball |v| <= v_max; nodes in the corners
of the cube are inert and always return zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.linalg

from ..grid import ConfigurationError, ShapeError, VelocityGrid
from ..maxwellian import DomainError, FluidState, maxwellian
from . import _kernels


class NumericalRankError(np.linalg.LinAlgError):
    """The hydrodynamic basis is numerically rank deficient on this grid."""


def abs_cos(c: np.ndarray) -> np.ndarray:
    return np.abs(c)


@dataclass(frozen=True)
class KernelConfig:
    """Collision kernel |v-u|^gamma B(theta) and its quadrature resolution.

    ``angular_law`` maps c = |cos theta| in [0, 1] to B and must satisfy
    B <= angular_bound * c. ``max_nv`` caps the strong-form operator and
    ``dense_max_nv`` the dense assembly of L.
    """

    gamma: float = 1.0
    angular_law: Callable[[np.ndarray], np.ndarray] = abs_cos
    angular_bound: float = 1.0
    n_polar: int = 4
    n_azimuth: int = 8
    cutoff_m: float | None = None
    max_nv: int = 24
    dense_max_nv: int = 16

    def __post_init__(self):
        if not -3.0 < self.gamma <= 1.0:
            raise ConfigurationError(f"gamma must lie in (-3, 1], got {self.gamma}")
        if self.n_polar < 4 or self.n_azimuth < 8:
            raise ConfigurationError("sphere quadrature needs at least 4 x 8 nodes")
        if self.cutoff_m is not None and not self.cutoff_m > 0:
            raise ConfigurationError(f"cutoff radius must be positive, got {self.cutoff_m}")
        c = np.linspace(0.0, 1.0, 257)
        b = np.asarray(self.angular_law(c), dtype=float)
        if np.any(b < 0) or np.any(b > self.angular_bound * c + 1e-14):
            raise ConfigurationError("angular law must satisfy 0 <= B <= C |cos theta|")

    @property
    def n_sphere(self) -> tuple[int, int]:
        return (self.n_polar, self.n_azimuth)


@dataclass(frozen=True)
class CollisionDiagnostics:
    """Spectral data of the dense linearised operator."""

    c0: float
    null_dim: int
    conservation_residuals: tuple[float, float, float]
    eigenvalues: np.ndarray = field(repr=False)
    failure: str | None = None


@dataclass(frozen=True)
class _Support:
    act: np.ndarray
    coords: np.ndarray
    idx3: np.ndarray
    v0: float
    vmax2: float


@lru_cache(maxsize=8)
def _support(vgrid: VelocityGrid) -> _Support:
    mask = vgrid.ball
    act = np.argwhere(mask).astype(np.int64)
    coords = np.ascontiguousarray(np.stack([vgrid.nodes[act[:, i]] for i in range(3)], axis=1))
    idx3 = -np.ones(vgrid.shape, dtype=np.int64)
    idx3[mask] = np.arange(len(act))
    return _Support(act, coords, idx3, float(vgrid.nodes[0]), vgrid.v_max**2 * (1.0 + 1e-12))


@lru_cache(maxsize=8)
def _sphere_rule(cfg: KernelConfig):
    x, w = np.polynomial.legendre.leggauss(cfg.n_polar)
    c = 0.5 * (x + 1.0)
    b = np.asarray(cfg.angular_law(c), dtype=float)
    wc = 2.0 * (0.5 * w) * (2.0 * np.pi / cfg.n_azimuth) * b
    phi = 2.0 * np.pi * (np.arange(cfg.n_azimuth) + 0.5) / cfg.n_azimuth
    return c, wc, np.cos(phi), np.sin(phi)


def angular_total(cfg: KernelConfig) -> float:
    """Discrete value of the integral of B over the unit sphere (2 pi for |cos theta|)."""
    _, wc, cphi, _ = _sphere_rule(cfg)
    return float(np.sum(wc) * len(cphi))


def _check_slice(F: np.ndarray, vgrid: VelocityGrid, name: str) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if F.shape != vgrid.shape:
        raise ShapeError(f"{name} has shape {F.shape}, expected {vgrid.shape}")
    return F


def _to_ball(F: np.ndarray, vgrid: VelocityGrid) -> np.ndarray:
    return np.ascontiguousarray(np.where(vgrid.ball, F, 0.0))


def _scatter(values: np.ndarray, vgrid: VelocityGrid) -> np.ndarray:
    out = np.zeros(vgrid.shape)
    out[vgrid.ball] = values
    return out


def collide_Q(F1: np.ndarray, F2: np.ndarray, vgrid: VelocityGrid, cfg: KernelConfig = KernelConfig()) -> np.ndarray:
    """Strong-form Q(F1, F2): gain minus loss by midpoint and sphere quadrature.

    Cost is O(N_ball^2 * n_polar * n_azimuth); grids finer than ``cfg.max_nv``
    are refused.
    """
    if vgrid.n_v > cfg.max_nv:
        raise ConfigurationError(
            f"n_v={vgrid.n_v} exceeds the full-Q cap {cfg.max_nv}; use the BGK backend for large grids"
        )
    F1 = _to_ball(_check_slice(F1, vgrid, "F1"), vgrid)
    F2 = _to_ball(_check_slice(F2, vgrid, "F2"), vgrid)
    sup = _support(vgrid)
    c, wc, cphi, sphi = _sphere_rule(cfg)
    out = _kernels.collide_strong(F1, F2, sup.act, sup.coords, vgrid.n_v, sup.v0, vgrid.h, sup.vmax2,
                                  float(cfg.gamma), c, wc, cphi, sphi)
    return _scatter(out, vgrid)


def collision_frequency(
    mu: np.ndarray,
    vgrid: VelocityGrid,
    cfg: KernelConfig = KernelConfig(),
    points: np.ndarray | None = None,
) -> np.ndarray:
    """nu(v) = int B |v - v'|^gamma mu(v') dv' domega at every node (or at ``points``)."""
    mu = _check_slice(mu, vgrid, "mu")
    if np.any(mu < 0) or not np.sum(mu) > 0:
        raise DomainError("collision frequency needs a nonnegative slice with positive mass")
    sup = _support(vgrid)
    f_in = mu[vgrid.ball]
    if points is None:
        v1, v2, v3 = vgrid.mesh
        pts = np.ascontiguousarray(np.stack([v1.ravel(), v2.ravel(), v3.ravel()], axis=1))
        vals = _kernels.frequency(mu, pts, sup.coords, f_in, float(cfg.gamma), angular_total(cfg), vgrid.weight)
        return vals.reshape(vgrid.shape)
    pts = np.ascontiguousarray(np.atleast_2d(points), dtype=float)
    return _kernels.frequency(mu, pts, sup.coords, f_in, float(cfg.gamma), angular_total(cfg), vgrid.weight)


def interpolate(F: np.ndarray, points: np.ndarray, vgrid: VelocityGrid) -> np.ndarray:
    """Off-grid values of a nodal field, as used inside the collision quadrature."""
    sup = _support(vgrid)
    pts = np.ascontiguousarray(np.atleast_2d(points), dtype=float)
    return _kernels.interpolate(_to_ball(F, vgrid), pts, vgrid.n_v, sup.v0, vgrid.h, sup.vmax2)


def linearized_L(
    g: np.ndarray,
    mu: np.ndarray,
    vgrid: VelocityGrid,
    cfg: KernelConfig = KernelConfig(),
    route: str = "form",
) -> np.ndarray:
    """L g = -(1/sqrt(mu)) [Q(mu, sqrt(mu) g) + Q(sqrt(mu) g, mu)].

    ``route="form"`` evaluates L from its symmetric quadratic form, which keeps
    L self-adjoint with the collision invariants as exact kernel.
    ``route="strong"`` composes two calls of :func:`collide_Q`.
    """
    g = _check_slice(g, vgrid, "g")
    mu = _check_slice(mu, vgrid, "mu")
    if np.any(mu[vgrid.ball] <= 0):
        raise DomainError("linearisation needs a strictly positive Maxwellian on the ball")
    if route == "strong":
        smu = np.sqrt(mu)
        q = collide_Q(mu, smu * g, vgrid, cfg) + collide_Q(smu * g, mu, vgrid, cfg)
        return np.where(vgrid.ball, -q / smu, 0.0)
    if route != "form":
        raise ConfigurationError(f"unknown route {route!r}")
    if vgrid.n_v > cfg.max_nv:
        raise ConfigurationError(f"n_v={vgrid.n_v} exceeds the full-Q cap {cfg.max_nv}")
    sup = _support(vgrid)
    c, wc, cphi, sphi = _sphere_rule(cfg)
    _, out = _kernels.dirichlet_form(np.ascontiguousarray(g[vgrid.ball]), sup.coords, sup.idx3, vgrid.n_v,
                                     sup.v0, vgrid.h, sup.vmax2, float(cfg.gamma), c, wc, cphi, sphi,
                                     np.ascontiguousarray(mu[vgrid.ball]), False)
    return _scatter(out, vgrid)


def assemble_L(mu: np.ndarray, vgrid: VelocityGrid, cfg: KernelConfig = KernelConfig(),
               symmetrize: bool = True) -> np.ndarray:
    """Dense matrix of L on the ball nodes (ordering of ``vgrid.ball``).

    The assembled form is symmetric up to rounding; ``symmetrize=False`` returns
    it untouched so the asymmetry can be measured.
    """
    mu = _check_slice(mu, vgrid, "mu")
    if vgrid.n_v > cfg.dense_max_nv:
        raise ConfigurationError(f"dense assembly is limited to n_v <= {cfg.dense_max_nv}, got {vgrid.n_v}")
    if np.any(mu[vgrid.ball] <= 0):
        raise DomainError("linearisation needs a strictly positive Maxwellian on the ball")
    sup = _support(vgrid)
    c, wc, cphi, sphi = _sphere_rule(cfg)
    A, _ = _kernels.dirichlet_form(np.zeros(1), sup.coords, sup.idx3, vgrid.n_v, sup.v0, vgrid.h, sup.vmax2,
                                   float(cfg.gamma), c, wc, cphi, sphi,
                                   np.ascontiguousarray(mu[vgrid.ball]), True)
    return 0.5 * (A + A.T) if symmetrize else A


def hydrodynamic_basis(mu: np.ndarray, vgrid: VelocityGrid) -> np.ndarray:
    """sqrt(mu) times (1, v1, v2, v3, |v|^2), stacked on a new axis before the velocity axes."""
    smu = np.sqrt(np.maximum(mu, 0.0))
    v1, v2, v3 = vgrid.mesh
    return np.stack([smu, v1 * smu, v2 * smu, v3 * smu, vgrid.speed2 * smu], axis=-4)


def _orthonormal_basis(mu: np.ndarray, vgrid: VelocityGrid, mask: np.ndarray | None) -> np.ndarray:
    basis = hydrodynamic_basis(mu, vgrid)
    if mask is not None:
        basis = basis * mask
    lead = basis.shape[:-4]
    B = basis.reshape(lead + (5, -1)).copy()
    # modified Gram-Schmidt, applied twice for stability
    for _ in range(2):
        for i in range(5):
            for j in range(i):
                B[..., i, :] -= np.sum(B[..., i, :] * B[..., j, :], axis=-1)[..., None] * B[..., j, :]
            nrm = np.sqrt(np.sum(B[..., i, :] ** 2, axis=-1))
            ref = np.sqrt(np.sum(basis.reshape(lead + (5, -1))[..., i, :] ** 2, axis=-1))
            if np.any(nrm <= 1e-10 * ref):
                raise NumericalRankError("hydrodynamic basis is numerically rank deficient on this grid")
            B[..., i, :] /= nrm[..., None]
    return B


def project_P(g: np.ndarray, mu: np.ndarray, vgrid: VelocityGrid, mask: np.ndarray | None = None) -> np.ndarray:
    """L^2_v projection of g onto span{sqrt(mu), v sqrt(mu), |v|^2 sqrt(mu)}.

    Leading axes of ``g`` and ``mu`` (spatial nodes) are handled independently.
    ``mask`` restricts the inner product to a set of nodes.
    """
    g = np.asarray(g, dtype=float)
    if g.shape[-3:] != vgrid.shape:
        raise ShapeError(f"g has shape {g.shape}, expected trailing {vgrid.shape}")
    B = _orthonormal_basis(np.broadcast_to(mu, g.shape), vgrid, mask)
    flat = g.reshape(g.shape[:-3] + (1, -1))
    coef = np.sum(B * flat, axis=-1)
    return np.sum(coef[..., None] * B, axis=-2).reshape(g.shape)


def _conservation(F: np.ndarray, vgrid: VelocityGrid, cfg: KernelConfig) -> tuple[float, float, float]:
    q = collide_Q(F, F, vgrid, cfg)
    w = vgrid.weight
    v1, v2, v3 = vgrid.mesh
    mass = abs(np.sum(q)) * w
    mom = max(abs(np.sum(q * vi)) for vi in (v1, v2, v3)) * w
    energy = abs(np.sum(q * vgrid.speed2)) * w
    return float(mass), float(mom), float(energy)


def measure_coercivity(
    mu: np.ndarray,
    vgrid: VelocityGrid,
    cfg: KernelConfig = KernelConfig(),
    null_threshold: float = 1e-8,
    nu: np.ndarray | None = None,
    L: np.ndarray | None = None,
) -> CollisionDiagnostics:
    """Null-space dimension of L and the coercivity constant in the nu-norm.

    c0 is the smallest eigenvalue of <L g, g> = c <nu g, g> restricted to the
    orthogonal complement of the hydrodynamic span. Conservation residuals
    are the moments of Q(F, F) for a two-beam F built from ``mu``. A matrix
    already assembled for ``mu`` may be passed as ``L``.
    """
    L = assemble_L(mu, vgrid, cfg) if L is None else L
    eig = scipy.linalg.eigvalsh(L)
    lam_max = float(np.max(np.abs(eig)))
    null_dim = int(np.sum(np.abs(eig) < null_threshold * lam_max))
    failure = None
    if eig[0] < -null_threshold * lam_max:
        failure = f"indefinite: smallest eigenvalue {eig[0]:.3e} below -{null_threshold:g} * lambda_max"
    if null_dim != 5 and failure is None:
        failure = f"null space dimension {null_dim} differs from 5"

    if nu is None:
        nu = collision_frequency(mu, vgrid, cfg)
    mu_b = mu[vgrid.ball]
    v = _support(vgrid).coords
    basis = np.sqrt(mu_b)[:, None] * np.column_stack([np.ones(len(v)), v, np.sum(v**2, axis=1)])
    Qfull, _ = np.linalg.qr(basis, mode="complete")
    Qc = Qfull[:, 5:]
    Lc = Qc.T @ L @ Qc
    Nc = Qc.T @ (nu[vgrid.ball][:, None] * Qc)
    c0 = float(scipy.linalg.eigh(Lc, Nc, eigvals_only=True, subset_by_index=[0, 0])[0])

    state = _moments_of(mu, vgrid)
    shift = np.sqrt(state.T) * np.array([1.0, 0.0, 0.0])
    F = 0.5 * (maxwellian(FluidState(state.rho, state.u + shift, state.T * 0.5), vgrid)
               + maxwellian(FluidState(state.rho, state.u - shift, state.T * 0.5), vgrid))
    return CollisionDiagnostics(c0, null_dim, _conservation(F, vgrid, cfg), eig, failure)


def _moments_of(mu: np.ndarray, vgrid: VelocityGrid) -> FluidState:
    from ..maxwellian import fluid_from_moments

    s = fluid_from_moments(mu, vgrid)
    return FluidState(np.asarray(s.rho), np.asarray(s.u), np.asarray(s.T))


def cutoff_chi(s: np.ndarray, m: float) -> np.ndarray:
    """C^1 ramp: 1 on [0, m], cosine taper on [m, 2m], 0 beyond."""
    s = np.asarray(s, dtype=float)
    taper = 0.5 * (1.0 + np.cos(np.pi * (s - m) / m))
    return np.where(s <= m, 1.0, np.where(s >= 2.0 * m, 0.0, taper))


def _radial_rule(breaks: np.ndarray, n_gauss: int):
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    nodes, wts = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        wts.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(wts)


@lru_cache(maxsize=4)
def _direction_rule(n_cos: int = 8, n_phi: int = 16):
    x, w = np.polynomial.legendre.leggauss(n_cos)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    ct = np.repeat(x, n_phi)
    st = np.sqrt(1.0 - ct**2)
    ph = np.tile(phi, n_cos)
    dirs = np.column_stack([st * np.cos(ph), st * np.sin(ph), ct])
    return np.ascontiguousarray(dirs), np.repeat(w, n_phi) * (2.0 * np.pi / n_phi)


def _cutoff_rules(m: float, vgrid: VelocityGrid, panel: float, n_gauss: int):
    """Radial rules (nodes, weights) for the full range and for the chi_m-weighted cutoff range."""
    if not m > 0:
        raise ConfigurationError(f"cutoff radius must be positive, got {m}")
    r_max = 4.0 * vgrid.v_max
    base = np.linspace(0.0, r_max, int(np.ceil(r_max / panel)) + 1)
    full = _radial_rule(base, n_gauss)
    breaks = np.unique(np.concatenate([base, [b for b in (m, 2.0 * m) if b < r_max]]))
    breaks = breaks[breaks <= min(2.0 * m, r_max)]
    cut_r, cut_w = _radial_rule(breaks, n_gauss)
    return full, (cut_r, cut_w * cutoff_chi(cut_r, m))


def _k_parts(G, mu: FluidState, T_M: float, rule, vgrid: VelocityGrid, cfg: KernelConfig):
    sup = _support(vgrid)
    c, wc, cphi, sphi = _sphere_rule(cfg)
    dirs, dir_w = _direction_rule()
    u = np.asarray(mu.u, dtype=float).reshape(3)
    r, w = rule
    return _kernels.k_split(G, sup.coords, vgrid.n_v, sup.v0, vgrid.h, sup.vmax2, float(cfg.gamma),
                            r, w * r**2, dirs, dir_w, c, wc, cphi, sphi, float(mu.rho), u[0], u[1], u[2],
                            float(mu.T), float(T_M))


def split_K(
    g: np.ndarray,
    mu: FluidState,
    T_M: float,
    m: float,
    vgrid: VelocityGrid,
    cfg: KernelConfig = KernelConfig(),
    panel: float = 0.5,
    n_gauss: int = 4,
    complement: bool = True,
) -> tuple[np.ndarray, np.ndarray | None]:
    """(K^m g, K^c g) for L_M = nu + K1 - K2 with weight Maxwellian of temperature T_M.

    ``mu`` holds scalar (rho, u, T). Relative speeds run up to 4 v_max on
    panels of width ``panel``; the cutoff radii m and 2m are added as breaks.
    ``g`` may carry a leading batch axis. K^c needs the whole relative-speed
    range and dominates the cost; with ``complement=False`` it is skipped (None).
    """
    g = np.asarray(g, dtype=float)
    batch = g.ndim == 4
    G = g if batch else g[None]
    if G.shape[1:] != vgrid.shape:
        raise ShapeError(f"g has shape {g.shape}, expected trailing {vgrid.shape}")
    G = np.ascontiguousarray(np.where(vgrid.ball, G, 0.0))
    full, cut = _cutoff_rules(m, vgrid, panel, n_gauss)

    def apply(rule):
        k1, k2 = _k_parts(G, mu, T_M, rule, vgrid, cfg)
        out = np.zeros((G.shape[0],) + vgrid.shape)
        out[:, vgrid.ball] = k1 - k2
        return out

    km = apply(cut)
    if not complement:
        return (km, None) if batch else (km[0], None)
    same = len(cut[0]) == len(full[0]) and np.array_equal(cut[0], full[0]) and np.array_equal(cut[1], full[1])
    kc = np.zeros_like(km) if same else apply(full) - km
    return (km, kc) if batch else (km[0], kc[0])


def cutoff_operator_norm(
    mu: FluidState,
    T_M: float,
    m: float,
    vgrid: VelocityGrid,
    cfg: KernelConfig = KernelConfig(),
    panel: float = 0.5,
    n_gauss: int = 4,
) -> np.ndarray:
    """Row sums of |k^m| on the ball: the sup-norm operator bound of K^m at each v.

    K1 and K2 have nonnegative kernels, so sup over ||g||_inf <= 1 of |K^m g(v)|
    is at most (K1^m 1 + K2^m 1)(v), and that is what is returned.
    """
    ones = np.ascontiguousarray(np.where(vgrid.ball, 1.0, 0.0)[None])
    _, cut = _cutoff_rules(m, vgrid, panel, n_gauss)
    k1, k2 = _k_parts(ones, mu, T_M, cut, vgrid, cfg)
    out = np.zeros(vgrid.shape)
    out[vgrid.ball] = k1[0] + k2[0]
    return out
