"""Time integration of d_t F + v.grad_x F = Q(F, F) / eps and the limit diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .collision import KernelConfig, assemble_L, bgk_rate, collide_Q, collision_frequency, match_maxwellian, project_P
from .grid import ConfigurationError, LINF, L2, SpatialGrid, VelocityGrid, norm, weighted_sup
from .maxwellian import FluidState, global_maxwellian, maxwellian, moments
from .fluid import euler_time_derivatives, spatial_gradient


class StabilityError(ValueError):
    """Requested step exceeds the explicit collision limit."""

    def __init__(self, dt: float, dt_max: float):
        super().__init__(f"dt={dt:.3e} exceeds the admissible step {dt_max:.3e}")
        self.dt_max = dt_max


@dataclass(frozen=True)
class ScalingConfig:
    """Knudsen number, fluctuation amplitude and the collision model of a run.

    ``scheme`` is "strang" (transport/collision splitting) or "imex"
    (ARS(4,4,3) with implicit relaxation, BGK only).
    """

    epsilon: float
    delta: float
    beta: float = 3.5
    backend: str = "bgk"
    scheme: str = "strang"
    gamma: float = 1.0
    rate_model: str = "constant"
    nu0: float = 1.0
    kernel: KernelConfig = field(default_factory=KernelConfig)
    c_stab: float = 0.5

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if not self.delta >= 0:
            raise ConfigurationError(f"delta must be nonnegative, got {self.delta}")
        if self.backend not in ("bgk", "full-Q"):
            raise ConfigurationError(f"unknown backend {self.backend!r}")
        if self.scheme not in ("strang", "imex"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "imex" and self.backend != "bgk":
            raise ConfigurationError("the IMEX scheme is available for the BGK backend only")

    @property
    def regime(self) -> float:
        """eps / delta, small in the acoustic regime."""
        return self.epsilon / self.delta if self.delta > 0 else np.inf


@dataclass(frozen=True)
class Distribution:
    """Phase-space values F(x, v) at time t."""

    values: np.ndarray = field(repr=False)
    t: float = 0.0


class _Transport:
    """Free streaming on the periodic box, exact in time per velocity node."""

    def __init__(self, sgrid: SpatialGrid, vgrid: VelocityGrid):
        self.sgrid, self.vgrid = sgrid, vgrid
        d = sgrid.dim_x
        self.axes = tuple(range(d))
        ex = (Ellipsis,) + (None,) * 3
        vs = vgrid.mesh
        self.kv = sum(sgrid.wavenumbers[i][ex] * vs[i] for i in range(d))
        nyq = np.zeros(sgrid.shape, dtype=bool)
        for i, n in enumerate(sgrid.n_x):
            idx = [slice(None)] * d
            idx[i] = n // 2
            nyq[tuple(idx)] = True
        self.keep = (~nyq)[ex]

    def shift(self, F: np.ndarray, tau: float) -> np.ndarray:
        Fh = np.fft.fftn(F, axes=self.axes)
        return np.fft.ifftn(Fh * np.exp(-1j * self.kv * tau), axes=self.axes).real

    def rate(self, F: np.ndarray) -> np.ndarray:
        """-v.grad_x F by spectral differentiation."""
        Fh = np.fft.fftn(F, axes=self.axes)
        return np.fft.ifftn(-1j * self.kv * self.keep * Fh, axes=self.axes).real


_TRANSPORT: dict = {}


def _transport(sgrid: SpatialGrid, vgrid: VelocityGrid) -> _Transport:
    key = (sgrid, vgrid)
    if key not in _TRANSPORT:
        _TRANSPORT.clear()
        _TRANSPORT[key] = _Transport(sgrid, vgrid)
    return _TRANSPORT[key]


def _check(F: np.ndarray, sgrid: SpatialGrid, vgrid: VelocityGrid) -> None:
    if F.shape != sgrid.shape + vgrid.shape:
        raise ConfigurationError(f"distribution of shape {F.shape} does not match the grids")


def _full_q_rate(F: np.ndarray, scaling: ScalingConfig, vgrid: VelocityGrid) -> np.ndarray:
    flat = F.reshape((-1,) + vgrid.shape)
    out = np.stack([collide_Q(f, f, vgrid, scaling.kernel) for f in flat])
    return out.reshape(F.shape) / scaling.epsilon


def full_q_step_limit(F: np.ndarray, scaling: ScalingConfig, vgrid: VelocityGrid) -> float:
    """Largest admissible explicit step c_stab eps / max nu over the spatial nodes."""
    flat = F.reshape((-1,) + vgrid.shape)
    nu_max = max(float(np.max(collision_frequency(np.maximum(f, 0.0), vgrid, scaling.kernel)[vgrid.ball])) for f in flat)
    return scaling.c_stab * scaling.epsilon / nu_max


def step_kinetic(F: Distribution, dt: float, scaling: ScalingConfig, sgrid: SpatialGrid, vgrid: VelocityGrid) -> Distribution:
    """Advance one step of length ``dt``.

    Strang: half transport, collision over dt, half transport. The BGK
    collision is the exact relaxation towards the moment-matched Maxwellian;
    the full operator uses one Heun step and needs dt <= c_stab eps / max nu.
    IMEX: one ARS(4,4,3) step with spectral transport.
    """
    values = F.values
    _check(values, sgrid, vgrid)
    tr = _transport(sgrid, vgrid)
    eps = scaling.epsilon
    if scaling.scheme == "imex":
        return Distribution(_imex_step(values, dt, scaling, tr, vgrid), F.t + dt)

    if scaling.backend == "full-Q":
        dt_max = full_q_step_limit(values, scaling, vgrid)
        if dt > dt_max:
            raise StabilityError(dt, dt_max)

    G = tr.shift(values, 0.5 * dt)
    if scaling.backend == "bgk":
        state = match_maxwellian(G, vgrid)
        M = maxwellian(state, vgrid)
        decay = np.exp(-bgk_rate(state.rho, scaling.rate_model, scaling.nu0, scaling.gamma) * dt / eps)
        G = M + decay[..., None, None, None] * (G - M)
    else:
        k1 = _full_q_rate(G, scaling, vgrid)
        k2 = _full_q_rate(G + dt * k1, scaling, vgrid)
        G = G + 0.5 * dt * (k1 + k2)
    return Distribution(tr.shift(G, 0.5 * dt), F.t + dt)


# ARS(4,4,3): explicit rows act on stages 0..i-1, implicit rows on stages 1..i.
_ARS_EXPLICIT = (
    (1 / 2,),
    (11 / 18, 1 / 18),
    (5 / 6, -5 / 6, 1 / 2),
    (1 / 4, 7 / 4, 3 / 4, -7 / 4),
)
_ARS_IMPLICIT = (
    (1 / 2,),
    (1 / 6, 1 / 2),
    (-1 / 2, 1 / 2, 1 / 2),
    (3 / 2, -3 / 2, 1 / 2, 1 / 2),
)


def _imex_step(F: np.ndarray, dt: float, scaling: ScalingConfig, tr: _Transport, vgrid: VelocityGrid) -> np.ndarray:
    """One ARS(4,4,3) step; stiffly accurate, so the last stage is the new value.

    The relaxation stage Y = R + a dt nu/eps (M[Y] - Y) is solved exactly
    because M[Y] = M[R] (relaxation conserves the moments).
    """
    eps = scaling.epsilon
    transport = [tr.rate(F)]
    relax = []
    Y = F
    for i in range(4):
        R = F.copy()
        for j, a in enumerate(_ARS_EXPLICIT[i]):
            R += dt * a * transport[j]
        for j, a in enumerate(_ARS_IMPLICIT[i][:-1]):
            R += dt * a * relax[j]
        a_ii = _ARS_IMPLICIT[i][-1]
        state = match_maxwellian(R, vgrid)
        lam = (a_ii * dt / eps * bgk_rate(state.rho, scaling.rate_model, scaling.nu0, scaling.gamma))[..., None, None, None]
        Y = (R + lam * maxwellian(state, vgrid)) / (1.0 + lam)
        relax.append((Y - R) / (a_ii * dt))
        if i < 3:
            transport.append(tr.rate(Y))
    return Y


@dataclass(frozen=True)
class KineticRun:
    """Snapshots at the requested times and the conserved totals after every step."""

    snapshots: list[Distribution] = field(repr=False)
    conservation: np.ndarray = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def at(self, t: float) -> Distribution:
        for s in self.snapshots:
            if abs(s.t - t) <= 1e-12 * max(1.0, abs(t)):
                return s
        raise KeyError(f"time {t} was not sampled")


def totals(F: np.ndarray, sgrid: SpatialGrid, vgrid: VelocityGrid) -> np.ndarray:
    """Spatial integrals of mass, momentum (3) and energy."""
    mass, mom, energy = moments(F, vgrid)
    dx = sgrid.cell_volume
    return np.array([np.sum(mass) * dx, *(np.sum(mom, axis=tuple(range(1, mom.ndim))) * dx), np.sum(energy) * dx])


def run_kinetic(
    init: Distribution,
    tau: float,
    scaling: ScalingConfig,
    sgrid: SpatialGrid,
    vgrid: VelocityGrid,
    sample_times=None,
    dt: float = 1e-2,
) -> KineticRun:
    """Integrate to ``tau`` with steps no longer than ``dt``, landing exactly on each sample time."""
    _check(init.values, sgrid, vgrid)
    if tau < 0:
        raise ConfigurationError("tau must be nonnegative")
    times = sorted(set([init.t + tau] if sample_times is None else [float(s) for s in sample_times]))
    if times and (times[0] < init.t or times[-1] > init.t + tau + 1e-14):
        raise ConfigurationError("sample times must lie in [t0, t0 + tau]")
    F = init
    log = [np.concatenate([[F.t], totals(F.values, sgrid, vgrid)])]
    snaps = []
    for target in times:
        span = target - F.t
        n = int(np.ceil(span / dt - 1e-12)) if span > 0 else 0
        for k in range(n):
            h = (target - F.t) / (n - k)
            F = step_kinetic(F, h, scaling, sgrid, vgrid)
            log.append(np.concatenate([[F.t], totals(F.values, sgrid, vgrid)]))
        F = Distribution(F.values, float(target)) if n else F
        snaps.append(F)
    return KineticRun(snaps, np.array(log))


def extract_fluctuation(F: Distribution | np.ndarray, delta: float, vgrid: VelocityGrid) -> np.ndarray:
    """G^eps = (F - mu^0) / delta."""
    if not delta > 0:
        raise ConfigurationError("delta must be positive")
    values = F.values if isinstance(F, Distribution) else np.asarray(F)
    return (values - global_maxwellian(vgrid)) / delta


@dataclass(frozen=True)
class FluidJet:
    """Fluid fields with spatial gradients (grad_u has shape (d, 3, *x)) and time derivatives."""

    state: FluidState
    grad_rho: np.ndarray
    grad_u: np.ndarray
    grad_T: np.ndarray
    dt_state: FluidState

    def at(self, node: tuple[int, ...]) -> "FluidJet":
        """The jet at one spatial node, with scalar fields."""
        node = tuple(node)

        def pick(s: FluidState) -> FluidState:
            return FluidState(np.asarray(s.rho[node]), s.u[(slice(None),) + node], np.asarray(s.T[node]))

        sl = (slice(None),) + node
        return FluidJet(pick(self.state), self.grad_rho[sl], self.grad_u[(slice(None), slice(None)) + node],
                        self.grad_T[sl], pick(self.dt_state))


def fluid_jet(state: FluidState, sgrid: SpatialGrid, time_derivative: FluidState | None = None) -> FluidJet:
    """Spectral gradients and, unless given, Euler time derivatives of a fluid field."""
    dts = euler_time_derivatives(state, sgrid) if time_derivative is None else time_derivative
    gr = np.stack(spatial_gradient(state.rho, sgrid))
    gT = np.stack(spatial_gradient(state.T, sgrid))
    gu = np.stack([np.stack(spatial_gradient(state.u[i], sgrid)) for i in range(3)], axis=1)
    return FluidJet(state, gr, gu, gT, dts)


def _log_derivative(rho, u, T, drho, du, dT, vgrid):
    """d log mu along a direction for fluid arrays of shape (*x) broadcast to phase space."""
    ex = (Ellipsis, None, None, None)
    c = [vi - u[i][ex] for i, vi in enumerate(vgrid.mesh)]
    c2 = sum(ci**2 for ci in c)
    T_ = T[ex]
    return (drho / rho)[ex] - 1.5 * (dT / T)[ex] + sum(ci * du[i][ex] for i, ci in enumerate(c)) / T_ + c2 * dT[ex] / (2.0 * T_**2)


def streaming_residual(jet: FluidJet, vgrid: VelocityGrid) -> tuple[np.ndarray, np.ndarray]:
    """(r, mu) with r = mu^{-1/2} (d_t + v.grad_x) mu for the local Maxwellian mu."""
    s, d = jet.state, jet.dt_state
    mu = maxwellian(s, vgrid)
    D = _log_derivative(s.rho, s.u, s.T, d.rho, d.u, d.T, vgrid)
    for j in range(jet.grad_rho.shape[0]):
        D = D + vgrid.mesh[j] * _log_derivative(s.rho, s.u, s.T, jet.grad_rho[j], jet.grad_u[j], jet.grad_T[j], vgrid)
    return np.sqrt(mu) * D, mu


def _ratio(Pr: np.ndarray, r: np.ndarray, mask) -> float:
    rr = r * mask if mask is not None else r
    return float(np.sqrt(np.sum(Pr**2)) / np.sqrt(np.sum(rr**2)))


def compat_residual(jet: FluidJet, vgrid: VelocityGrid, mask: np.ndarray | None = None) -> float:
    """||P r||_2 / ||r||_2: zero in the continuum exactly when the jet obeys the Euler equations."""
    r, mu = streaming_residual(jet, vgrid)
    return _ratio(project_P(r, mu, vgrid, mask), r, mask)


@dataclass(frozen=True)
class HilbertCorrector:
    """First corrector F1 (microscopic gauge) and the solvability residual ||P r|| / ||r||."""

    F1: np.ndarray = field(repr=False)
    compat_residual: float
    inconsistent: bool = False


def hilbert_F1(
    jet: FluidJet,
    vgrid: VelocityGrid,
    scaling: ScalingConfig,
    claims_euler: bool = True,
    compat_tol: float = 5e-3,
) -> HilbertCorrector:
    """F1 = -sqrt(mu) L^+ r with P(F1 / sqrt(mu)) = 0.

    For the full operator the pseudo-inverse comes from the eigen-decomposition
    of the dense L restricted to eigenvalues above 1e-8 lambda_max; it is only
    available for a single spatial node. For BGK, L = nu_bgk (I - P) and the
    inverse is explicit, so whole fields are accepted.
    """
    r, mu = streaming_residual(jet, vgrid)
    mask = vgrid.ball if scaling.backend == "full-Q" else None
    Pr = project_P(r, mu, vgrid, mask)
    compat = _ratio(Pr, r, mask)
    smu = np.sqrt(mu)

    if scaling.backend == "bgk":
        nu = bgk_rate(jet.state.rho, scaling.rate_model, scaling.nu0, scaling.gamma)
        g1 = -(r - Pr) / np.asarray(nu)[..., None, None, None]
    else:
        if r.shape != vgrid.shape:
            raise ConfigurationError("the full-operator corrector is computed one spatial node at a time")
        L = assemble_L(mu, vgrid, scaling.kernel)
        lam, V = np.linalg.eigh(L)
        keep = np.abs(lam) > 1e-8 * np.max(np.abs(lam))
        rb = r[vgrid.ball]
        gb = -(V[:, keep] @ ((V[:, keep].T @ rb) / lam[keep]))
        g1 = np.zeros(vgrid.shape)
        g1[vgrid.ball] = gb
        g1 = g1 - project_P(g1, mu, vgrid, mask)
    inconsistent = bool(claims_euler and compat > compat_tol)
    return HilbertCorrector(smu * g1, compat, inconsistent)


@dataclass(frozen=True)
class RemainderDiagnostics:
    """f_l2 = ||(F - expansion)/sqrt(mu)||_2 and h_winf = eps^{3/2} ||w (F - expansion)/sqrt(mu_M)||_inf."""

    f_l2: float
    h_winf: float


def remainder_diagnostics(
    F: Distribution | np.ndarray,
    fluid: FluidState,
    order: int,
    scaling: ScalingConfig,
    sgrid: SpatialGrid,
    vgrid: VelocityGrid,
    T_M: float | None = None,
    F1: np.ndarray | None = None,
) -> RemainderDiagnostics:
    """Defect of F against mu^delta (order 0) or mu^delta + eps F1 (order 1).

    ``T_M`` defaults to 0.75 min T; for order 1 the BGK corrector of ``fluid``
    is used unless ``F1`` is supplied.
    """
    if order not in (0, 1):
        raise ConfigurationError("order must be 0 or 1")
    values = F.values if isinstance(F, Distribution) else np.asarray(F)
    mu = maxwellian(fluid, vgrid)
    defect = values - mu
    if order == 1:
        if F1 is None:
            F1 = hilbert_F1(fluid_jet(fluid, sgrid), vgrid, scaling, claims_euler=False).F1
        defect = defect - scaling.epsilon * F1
    T_M = 0.75 * float(np.min(fluid.T)) if T_M is None else T_M
    mu_M = global_maxwellian(vgrid, T_M)
    f_l2 = norm(defect / np.sqrt(mu), L2, sgrid, vgrid)
    h = weighted_sup(defect, vgrid, scaling.beta, scaling.gamma, mu_M)
    return RemainderDiagnostics(f_l2, scaling.epsilon**1.5 * h)


def defect_norms(F: np.ndarray, reference: np.ndarray, sgrid: SpatialGrid, vgrid: VelocityGrid) -> tuple[float, float]:
    """(L2, sup) norms of F - reference over phase space."""
    d = F - reference
    return norm(d, L2, sgrid, vgrid), norm(d, LINF, sgrid, vgrid)
