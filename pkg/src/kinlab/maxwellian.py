"""Maxwellians, the linear limit profile and the interpolated Maxwellian jet.

Velocity-dependent arrays carry the three velocity axes last, so a
phase-space field on a 1-D spatial grid has shape (n_x, n_v, n_v, n_v).
Vector fields carry their component axis first: ``u`` has shape (3, *x).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ConfigurationError, SpatialGrid, VelocityGrid, norm, L2, LINF


class DomainError(ValueError):
    """Density or temperature left the admissible set."""


@dataclass(frozen=True)
class FluidState:
    """Density, bulk velocity (3, *x) and temperature of a gas."""

    rho: np.ndarray
    u: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        rho, u, T = (np.asarray(a, dtype=float) for a in (self.rho, self.u, self.T))
        if u.shape != (3,) + rho.shape or T.shape != rho.shape:
            raise ConfigurationError(f"shapes rho {rho.shape}, u {u.shape}, T {T.shape} do not match")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "T", T)

    def validate(self) -> None:
        for name, arr in (("rho", self.rho), ("T", self.T)):
            bad = ~(arr > 0)
            if np.any(bad):
                node = tuple(int(i) for i in np.argwhere(bad)[0])
                raise DomainError(f"{name} <= 0 at node {node}: {arr[node]!r}")

    @classmethod
    def constant(cls, shape: tuple[int, ...], rho=1.0, u=(0.0, 0.0, 0.0), T=1.0) -> "FluidState":
        ones = np.ones(shape)
        return cls(rho * ones, np.asarray(u, dtype=float).reshape((3,) + (1,) * len(shape)) * ones, T * ones)


@dataclass(frozen=True)
class AcousticState:
    """Solution (sigma, u, theta) of the linear acoustic system."""

    sigma: np.ndarray
    u: np.ndarray
    theta: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.sigma[None], self.u, self.theta[None]])


@dataclass(frozen=True)
class DifferenceState:
    """Second-order corrections (sigma_d, u_d, theta_d) of the fluid fields."""

    sigma_d: np.ndarray
    u_d: np.ndarray
    theta_d: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.sigma_d[None], self.u_d, self.theta_d[None]])


def _axis_factors(u: np.ndarray, T: np.ndarray, vgrid: VelocityGrid):
    """exp(-(v_i - u_i)^2 / 2T) for each axis, shape (*x, n_v)."""
    v = vgrid.nodes
    return [np.exp(-((v - u[i][..., None]) ** 2) / (2.0 * T[..., None])) for i in range(3)]


def maxwellian(state: FluidState, vgrid: VelocityGrid) -> np.ndarray:
    """Sample rho / (2 pi T)^{3/2} exp(-|v-u|^2 / 2T) at every phase-space node."""
    state.validate()
    e1, e2, e3 = _axis_factors(state.u, state.T, vgrid)
    amp = state.rho / (2.0 * np.pi * state.T) ** 1.5
    return amp[..., None, None, None] * e1[..., :, None, None] * e2[..., None, :, None] * e3[..., None, None, :]


def maxwellian_point(rho: float, u, T: float, vgrid: VelocityGrid) -> np.ndarray:
    """Maxwellian with scalar parameters, shape (n_v, n_v, n_v)."""
    state = FluidState(np.asarray(float(rho)), np.asarray(u, dtype=float), np.asarray(float(T)))
    return maxwellian(state, vgrid)


def global_maxwellian(vgrid: VelocityGrid, T: float = 1.0) -> np.ndarray:
    """Centred Maxwellian with unit density; T=1 gives the reference state mu^0."""
    return maxwellian_point(1.0, (0.0, 0.0, 0.0), T, vgrid)


def moments(F: np.ndarray, vgrid: VelocityGrid):
    """Discrete mass, momentum (3, *x) and energy (1/2 int |v|^2 F) of ``F``."""
    w = vgrid.weight
    v1, v2, v3 = vgrid.mesh
    axes = (-3, -2, -1)
    mass = np.sum(F, axis=axes) * w
    mom = np.stack([np.sum(F * vi, axis=axes) * w for vi in (v1, v2, v3)])
    energy = 0.5 * np.sum(F * vgrid.speed2, axis=axes) * w
    return mass, mom, energy


def fluid_from_moments(F: np.ndarray, vgrid: VelocityGrid) -> FluidState:
    """(rho, u, T) recovered from the discrete moments of ``F``."""
    mass, mom, energy = moments(F, vgrid)
    u = mom / mass
    T = (2.0 * energy / mass - np.sum(u**2, axis=0)) / 3.0
    return FluidState(mass, u, T)


@dataclass(frozen=True)
class MaxwellBounds:
    """Outcome of the moderate-temperature check and the two-sided Maxwellian bound.

    On success ``c1 mu_M <= mu <= c2 mu_M**alpha`` holds at every checked node.
    """

    passed: bool
    T_M: float
    alpha: float = float("nan")
    c1: float = float("nan")
    c2: float = float("nan")
    violation: str | None = None


def check_bounds(state: FluidState, T_M: float, vgrid: VelocityGrid) -> MaxwellBounds:
    """Check T_M < T < 2 T_M everywhere and witness the constants c1, c2.

    ``alpha`` is the midpoint of the admissible interval (1/2, T_M / max T):
    any alpha below T_M / max T keeps mu / mu_M**alpha bounded for all v.
    The constants are the extreme ratios over all phase-space nodes.
    """
    T = state.T
    lo, hi = float(np.min(T)), float(np.max(T))
    if not lo > T_M:
        node = tuple(int(i) for i in np.unravel_index(np.argmin(T), T.shape))
        return MaxwellBounds(False, T_M, violation=f"T={lo!r} <= T_M={T_M!r} at node {node}")
    if not hi < 2.0 * T_M:
        node = tuple(int(i) for i in np.unravel_index(np.argmax(T), T.shape))
        return MaxwellBounds(False, T_M, violation=f"T={hi!r} >= 2 T_M={2 * T_M!r} at node {node}")
    alpha = 0.5 * (0.5 + T_M / hi)
    mu = maxwellian(state, vgrid)
    mu_M = global_maxwellian(vgrid, T_M)
    c1 = float(np.min(mu / mu_M))
    c2 = float(np.max(mu / mu_M**alpha))
    return MaxwellBounds(True, T_M, alpha, c1, c2)


def limit_profile_G(acoustic: AcousticState, vgrid: VelocityGrid) -> np.ndarray:
    """G = (sigma + v.u + (|v|^2 - 3)/2 theta) mu^0 on phase space."""
    mu0 = global_maxwellian(vgrid)
    v1, v2, v3 = vgrid.mesh
    ex = (Ellipsis, None, None, None)
    poly = (
        acoustic.sigma[ex]
        + acoustic.u[0][ex] * v1
        + acoustic.u[1][ex] * v2
        + acoustic.u[2][ex] * v3
        + 0.5 * (vgrid.speed2 - 3.0) * acoustic.theta[ex]
    )
    return poly * mu0


def interpolated_fluid(acoustic: AcousticState, diff: DifferenceState, z: float) -> FluidState:
    """(1 + z sigma + z^2 sigma_d, z u + z^2 u_d, 1 + z theta + z^2 theta_d)."""
    rho = 1.0 + z * acoustic.sigma + z**2 * diff.sigma_d
    u = z * acoustic.u + z**2 * diff.u_d
    T = 1.0 + z * acoustic.theta + z**2 * diff.theta_d
    return FluidState(rho, u, T)


def mu_z_jet(acoustic: AcousticState, diff: DifferenceState, z: float, vgrid: VelocityGrid):
    """Return (mu(z), d mu/dz, d^2 mu/dz^2) in closed form.

    With primes for z-derivatives, mu' = D mu and mu'' = (D' + D^2) mu where
    D = rho'/rho - 3T'/2T + (v-u).u'/T + |v-u|^2 T'/2T^2.
    """
    state = interpolated_fluid(acoustic, diff, z)
    state.validate()
    mu = maxwellian(state, vgrid)
    ex = (Ellipsis, None, None, None)

    rho, T = state.rho[ex], state.T[ex]
    u = [state.u[i][ex] for i in range(3)]
    rho1 = (acoustic.sigma + 2.0 * z * diff.sigma_d)[ex]
    T1 = (acoustic.theta + 2.0 * z * diff.theta_d)[ex]
    u1 = [(acoustic.u[i] + 2.0 * z * diff.u_d[i])[ex] for i in range(3)]
    rho2 = 2.0 * diff.sigma_d[ex]
    T2 = 2.0 * diff.theta_d[ex]
    u2 = [2.0 * diff.u_d[i][ex] for i in range(3)]

    c = [vi - ui for vi, ui in zip(vgrid.mesh, u)]
    c2 = c[0] ** 2 + c[1] ** 2 + c[2] ** 2
    c_dot_u1 = sum(ci * ui for ci, ui in zip(c, u1))
    c_dot_u2 = sum(ci * ui for ci, ui in zip(c, u2))
    u1_sq = sum(ui**2 for ui in u1)

    D = rho1 / rho - 1.5 * T1 / T + c_dot_u1 / T + c2 * T1 / (2.0 * T**2)
    dD = (
        rho2 / rho
        - rho1**2 / rho**2
        - 1.5 * T2 / T
        + 1.5 * T1**2 / T**2
        - u1_sq / T
        + c_dot_u2 / T
        - 2.0 * T1 * c_dot_u1 / T**2
        + c2 * (T2 / (2.0 * T**2) - T1**2 / T**3)
    )
    return mu, D * mu, (dD + D**2) * mu


def expansion_defect(
    delta: float,
    euler: FluidState,
    acoustic: AcousticState,
    sgrid: SpatialGrid,
    vgrid: VelocityGrid,
) -> tuple[float, float]:
    """(sup, L2) norms over phase space of mu^delta - mu^0 - delta G at one time."""
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    defect = maxwellian(euler, vgrid) - global_maxwellian(vgrid) - delta * limit_profile_G(acoustic, vgrid)
    return norm(defect, LINF, sgrid, vgrid), norm(defect, L2, sgrid, vgrid)
