"""BGK relaxation surrogate with an exactly moment-matched Maxwellian."""
from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from ..grid import ConfigurationError, VelocityGrid
from ..maxwellian import DomainError, FluidState, maxwellian, moments


def _discrete_moments(params: np.ndarray, vgrid: VelocityGrid) -> np.ndarray:
    """Mass, momentum and energy of the sampled Maxwellian with parameters (rho, u1, u2, u3, T).

    The Maxwellian factorises over velocity axes, so only 1-D sums are needed.
    """
    v, h = vgrid.nodes, vgrid.h
    rho, u, T = params[..., 0], params[..., 1:4], params[..., 4]
    e = np.exp(-((v - u[..., None]) ** 2) / (2.0 * T[..., None, None]))
    s0 = h * np.sum(e, axis=-1)
    s1 = h * np.sum(e * v, axis=-1)
    s2 = h * np.sum(e * v**2, axis=-1)
    amp = rho / (2.0 * np.pi * T) ** 1.5
    p0 = np.prod(s0, axis=-1)
    out = np.empty(params.shape)
    out[..., 0] = amp * p0
    for i in range(3):
        others = np.prod(np.delete(s0, i, axis=-1), axis=-1)
        out[..., 1 + i] = amp * s1[..., i] * others
    out[..., 4] = 0.5 * amp * sum(s2[..., i] * np.prod(np.delete(s0, i, axis=-1), axis=-1) for i in range(3))
    return out


def match_maxwellian(F: np.ndarray, vgrid: VelocityGrid, tol: float = 1e-14, max_iter: int = 30) -> FluidState:
    """Parameters (rho, u, T) whose sampled Maxwellian has the discrete moments of F.

    Newton iteration on the 5-moment system per spatial node, started from the
    continuum relations and using a difference-quotient Jacobian.
    """
    mass, mom, energy = moments(F, vgrid)
    if np.any(~(mass > 0)):
        raise DomainError("non-positive mass in moment matching")
    target = np.concatenate([mass[..., None], np.moveaxis(mom, 0, -1), energy[..., None]], axis=-1)
    u = mom / mass
    T = (2.0 * energy / mass - np.sum(u**2, axis=0)) / 3.0
    if np.any(~(T > 0)):
        raise DomainError("non-positive temperature in moment matching")
    x = np.concatenate([mass[..., None], np.moveaxis(u, 0, -1), T[..., None]], axis=-1)
    scale = mass[..., None] * np.array([1.0, 1.0, 1.0, 1.0, 1.0])

    for _ in range(max_iter):
        res = _discrete_moments(x, vgrid) - target
        err = np.max(np.abs(res) / scale)
        if err < tol:
            break
        jac = np.empty(x.shape + (5,))
        for k in range(5):
            step = 1e-7 * (np.abs(x[..., k]) + 1.0)
            xp = x.copy()
            xp[..., k] += step
            jac[..., :, k] = (_discrete_moments(xp, vgrid) - target - res) / step[..., None]
        x = x - np.linalg.solve(jac, res[..., None])[..., 0]
        if np.any(~(x[..., 0] > 0)) or np.any(~(x[..., 4] > 0)):
            raise DomainError("moment matching left the admissible set")
    return FluidState(x[..., 0], np.moveaxis(x[..., 1:4], -1, 0), x[..., 4])


def bgk_rate(rho: np.ndarray, rate_model: str = "constant", nu0: float = 1.0, gamma: float = 1.0) -> np.ndarray:
    """Relaxation rate per spatial node.

    ``"constant"`` gives nu0 everywhere; ``"density"`` gives nu0 rho <(1+|v|)^gamma>
    with the average taken against the unit centred Maxwellian.
    """
    rho = np.asarray(rho, dtype=float)
    if rate_model == "constant":
        return nu0 * np.ones_like(rho)
    if rate_model == "density":
        avg, _ = quad(lambda r: (1.0 + r) ** gamma * np.sqrt(2.0 / np.pi) * r**2 * np.exp(-0.5 * r**2), 0.0, np.inf)
        return nu0 * avg * rho
    raise ConfigurationError(f"unknown rate model {rate_model!r}")


def bgk_operator(
    F: np.ndarray,
    vgrid: VelocityGrid,
    rate_model: str = "constant",
    nu0: float = 1.0,
    gamma: float = 1.0,
) -> np.ndarray:
    """nu_bgk (M[F] - F) with M[F] matching the discrete moments of F."""
    state = match_maxwellian(F, vgrid)
    nu = bgk_rate(state.rho, rate_model, nu0, gamma)
    return nu[..., None, None, None] * (maxwellian(state, vgrid) - F)


def relax_exact(F: np.ndarray, vgrid: VelocityGrid, tau: float, rate_model: str = "constant",
                nu0: float = 1.0, gamma: float = 1.0) -> np.ndarray:
    """Exact solution after time ``tau`` of dF/dt = nu (M[F] - F); M is invariant under the flow."""
    state = match_maxwellian(F, vgrid)
    M = maxwellian(state, vgrid)
    decay = np.exp(-bgk_rate(state.rho, rate_model, nu0, gamma) * tau)[..., None, None, None]
    return M + decay * (F - M)
