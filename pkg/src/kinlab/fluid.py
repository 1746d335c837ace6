"""Acoustic and compressible Euler solvers on the periodic box.

The acoustic system is solved exactly mode by mode. The Euler system is
integrated in the non-conservative variables (rho, u, T) with RK4 in time and
either dealiased spectral derivatives or a MUSCL finite-volume scheme.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ConfigurationError, SpatialGrid, norm, sobolev
from .maxwellian import AcousticState, DifferenceState, DomainError, FluidState

SOUND_SPEED = np.sqrt(5.0 / 3.0)


def default_acoustic_data(sgrid: SpatialGrid, a: float = 1.0, b: float = 1.0) -> AcousticState:
    """sigma = theta = a cos x1, u = (b sin x1, 0, 0)."""
    x1 = sgrid.coords[0]
    zero = np.zeros(sgrid.shape)
    return AcousticState(a * np.cos(x1), np.stack([b * np.sin(x1), zero, zero.copy()]), a * np.cos(x1))


def perturbed_data(acoustic: AcousticState, delta: float) -> FluidState:
    """rho = 1 + delta sigma, u = delta u, T = 1 + delta theta."""
    return FluidState(1.0 + delta * acoustic.sigma, delta * acoustic.u, 1.0 + delta * acoustic.theta)


def _fft(f, sgrid):
    return np.fft.fftn(f, axes=tuple(range(f.ndim - sgrid.dim_x, f.ndim)))


def _ifft(f, sgrid):
    return np.fft.ifftn(f, axes=tuple(range(f.ndim - sgrid.dim_x, f.ndim))).real


def solve_acoustic(init: AcousticState, t: float, sgrid: SpatialGrid) -> AcousticState:
    """Exact solution at time ``t`` (any sign) of

    d_t sigma + div u = 0, d_t u + grad(sigma + theta) = 0, 3/2 d_t theta + div u = 0.

    Per Fourier mode, sigma - 3/2 theta and the transverse velocity are frozen,
    while p = sigma + theta and the longitudinal velocity oscillate with
    frequency sqrt(5/3)|k|.
    """
    for arr in (init.sigma, init.theta):
        if arr.shape != sgrid.shape:
            raise ConfigurationError("acoustic data does not live on this grid")
    s_hat = _fft(init.sigma, sgrid)
    t_hat = _fft(init.theta, sgrid)
    u_hat = _fft(init.u, sgrid)

    ks = [k * np.ones(sgrid.shape) for k in sgrid.wavenumbers] + [np.zeros(sgrid.shape)] * (3 - sgrid.dim_x)
    kk = np.stack(ks)
    kmag = np.sqrt(np.sum(kk**2, axis=0))
    khat = np.divide(kk, kmag, out=np.zeros_like(kk), where=kmag > 0)

    uL0 = np.sum(khat * u_hat, axis=0)
    uT = u_hat - khat * uL0
    e = s_hat - 1.5 * t_hat
    p0 = s_hat + t_hat
    c = SOUND_SPEED
    w = c * kmag * t
    cos, sin = np.cos(w), np.sin(w)
    p = p0 * cos - 1j * c * uL0 * sin
    uL = uL0 * cos - 1j * p0 * sin / c

    theta = 0.4 * (p - e)
    sigma = 0.6 * p + 0.4 * e
    u = uT + khat * uL
    return AcousticState(_ifft(sigma, sgrid), _ifft(u, sgrid), _ifft(theta, sgrid))


def acoustic_energy(state: AcousticState, sgrid: SpatialGrid, s: int) -> float:
    """||(sigma, u, sqrt(3/2) theta)||^2 in H^s."""
    stacked = np.concatenate([state.sigma[None], state.u, np.sqrt(1.5) * state.theta[None]])
    return norm(stacked, sobolev(s), sgrid) ** 2


@dataclass(frozen=True)
class EulerRunConfig:
    """Time horizon and numerics of one Euler run."""

    delta: float
    tau: float = 1.0
    scheme: str = "spectral"
    cfl: float = 0.5
    s: int = 2
    filter_order: int = 36
    blowup_threshold: float | None = None

    def __post_init__(self):
        if not self.delta >= 0:
            raise ConfigurationError(f"delta must be nonnegative, got {self.delta}")
        if not self.tau >= 0:
            raise ConfigurationError(f"tau must be nonnegative, got {self.tau}")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigurationError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.scheme not in ("spectral", "finite-volume"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")

    @property
    def threshold(self) -> float:
        if self.blowup_threshold is not None:
            return self.blowup_threshold
        return 50.0 / self.delta if self.delta > 0 else np.inf


@dataclass(frozen=True)
class EulerResult:
    """Trajectory sampled at ``times``; ``status`` is "ok" or the reason the run stopped."""

    times: np.ndarray
    states: list[FluidState] = field(repr=False)
    status: str
    reached_time: float

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def at(self, t: float) -> FluidState:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-12 * max(1.0, abs(t)):
            raise KeyError(f"time {t} was not sampled")
        return self.states[i]


class _Spectral:
    def __init__(self, sgrid: SpatialGrid, filter_order: int):
        self.sgrid = sgrid
        self.ik = [1j * k for k in sgrid.wavenumbers]
        mask = np.ones(sgrid.shape)
        sigma = np.ones(sgrid.shape)
        for k, n, p in zip(sgrid.wavenumbers, sgrid.n_x, sgrid.period):
            kmax = np.pi * n / p
            frac = np.abs(k) / kmax
            mask = mask * (frac < 2.0 / 3.0)
            sigma = sigma * np.exp(-36.0 * frac**filter_order)
        self.filt = mask * sigma

    def smooth(self, f):
        return _ifft(_fft(f, self.sgrid) * self.filt, self.sgrid)

    def grad(self, f):
        fh = _fft(f, self.sgrid)
        return [_ifft(ik * fh, self.sgrid) for ik in self.ik]


def _euler_rates(rho, u, T, grad):
    """Time derivatives of (rho, u, T) from the non-conservative Euler system with R = 1."""
    gr, gT = grad(rho), grad(T)
    gu = [grad(u[i]) for i in range(3)]
    d = len(gr)
    div = sum(gu[j][j] for j in range(d))
    adv = lambda g: sum(u[j] * g[j] for j in range(d))
    rho_t = -adv(gr) - rho * div
    u_t = np.stack([-adv(gu[i]) - (gT[i] + T / rho * gr[i] if i < d else 0.0) for i in range(3)])
    T_t = -adv(gT) - 2.0 / 3.0 * T * div
    return rho_t, u_t, T_t, div


def euler_time_derivatives(state: FluidState, sgrid: SpatialGrid) -> FluidState:
    """(d_t rho, d_t u, d_t T) implied by the Euler equations, spectral in space."""
    sp = _Spectral(sgrid, 36)
    rho_t, u_t, T_t, _ = _euler_rates(state.rho, state.u, state.T, sp.grad)
    return _raw_state(rho_t, u_t, T_t)


def _raw_state(rho, u, T) -> FluidState:
    """FluidState without sign checks (used for time derivatives)."""
    obj = object.__new__(FluidState)
    object.__setattr__(obj, "rho", np.asarray(rho, dtype=float))
    object.__setattr__(obj, "u", np.asarray(u, dtype=float))
    object.__setattr__(obj, "T", np.asarray(T, dtype=float))
    return obj


def spatial_gradient(f: np.ndarray, sgrid: SpatialGrid) -> list[np.ndarray]:
    """Spectral gradient along the resolved spatial axes."""
    return _Spectral(sgrid, 36).grad(f)


class _Muscl:
    """Conservative MUSCL scheme with minmod slopes and a Rusanov flux."""

    def __init__(self, sgrid: SpatialGrid):
        self.sgrid = sgrid

    @staticmethod
    def _minmod(a, b):
        return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)

    def rates(self, rho, u, T):
        U = [rho, rho * u[0], rho * u[1], rho * u[2], rho * (0.5 * np.sum(u**2, axis=0) + 1.5 * T)]
        out = [np.zeros_like(rho) for _ in range(5)]
        for ax, dx in enumerate(self.sgrid.dx):
            def flux(r, m, E):
                v = m[ax] / r
                uu = m / r
                p = 2.0 / 3.0 * (E - 0.5 * r * np.sum(uu**2, axis=0))
                f = [m[ax], m[0] * v, m[1] * v, m[2] * v, (E + p) * v]
                f[1 + ax] = f[1 + ax] + p
                c = np.abs(v) + np.sqrt(5.0 / 3.0 * p / r)
                return f, c

            left, right = [], []
            for q in U:
                s = self._minmod(np.roll(q, -1, axis=ax) - q, q - np.roll(q, 1, axis=ax))
                left.append(q + 0.5 * s)
                right.append(np.roll(q - 0.5 * s, -1, axis=ax))
            fl, cl = flux(left[0], np.stack(left[1:4]), left[4])
            fr, cr = flux(right[0], np.stack(right[1:4]), right[4])
            a = np.maximum(cl, cr)
            for i in range(5):
                F = 0.5 * (fl[i] + fr[i]) - 0.5 * a * (right[i] - left[i])
                out[i] -= (F - np.roll(F, 1, axis=ax)) / dx
        return out


def _to_primitive(U):
    rho = U[0]
    u = np.stack(U[1:4]) / rho
    T = (U[4] / rho - 0.5 * np.sum(u**2, axis=0)) / 1.5
    return rho, u, T


def solve_euler(
    init: FluidState,
    cfg: EulerRunConfig,
    sgrid: SpatialGrid,
    sample_times: np.ndarray | list[float] | None = None,
) -> EulerResult:
    """Integrate the Euler system from ``init`` and sample the trajectory.

    Stops with status "lifespan exceeded" when max |div u| passes the blowup
    threshold and with "positivity lost" when rho or T stop being positive.
    """
    init.validate()
    times = np.asarray(sorted(set([0.0, cfg.tau] if sample_times is None else list(sample_times))), dtype=float)
    if times[0] < 0 or times[-1] > cfg.tau + 1e-14:
        raise ConfigurationError("sample times must lie in [0, tau]")
    spec = _Spectral(sgrid, cfg.filter_order)
    dx = min(sgrid.dx)

    if cfg.scheme == "spectral":
        state = [spec.smooth(init.rho), np.stack([spec.smooth(c) for c in init.u]), spec.smooth(init.T)]

        def rhs(y):
            rho_t, u_t, T_t, div = _euler_rates(y[0], y[1], y[2], spec.grad)
            return [spec.smooth(rho_t), np.stack([spec.smooth(c) for c in u_t]), spec.smooth(T_t)], div

        def prim(y):
            return y[0], y[1], y[2]
    else:
        muscl = _Muscl(sgrid)
        r0 = init.rho
        state = [r0, r0 * init.u[0], r0 * init.u[1], r0 * init.u[2], r0 * (0.5 * np.sum(init.u**2, axis=0) + 1.5 * init.T)]

        def rhs(y):
            rho, u, T = _to_primitive(y)
            div = sum(spec.grad(u[j])[j] for j in range(sgrid.dim_x))
            return muscl.rates(rho, u, T), div

        def prim(y):
            return _to_primitive(y)

    def combine(y, k, a):
        return [yi + a * ki for yi, ki in zip(y, k)]

    states, t = [], 0.0
    threshold = cfg.threshold
    for target in times:
        while t < target - 1e-14:
            rho, u, T = prim(state)
            speed = np.max(np.sqrt(np.sum(u**2, axis=0)) + SOUND_SPEED * np.sqrt(np.abs(T)))
            dt_max = cfg.cfl * dx / speed
            n = int(np.ceil((target - t) / dt_max - 1e-12))
            dt = (target - t) / max(n, 1)
            k1, div = rhs(state)
            if np.max(np.abs(div)) > threshold:
                return EulerResult(times[: len(states)], states, "lifespan exceeded", t)
            k2, _ = rhs(combine(state, k1, 0.5 * dt))
            k3, _ = rhs(combine(state, k2, 0.5 * dt))
            k4, _ = rhs(combine(state, k3, dt))
            state = [y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d) for y, a, b, c, d in zip(state, k1, k2, k3, k4)]
            t = t + dt if abs(t + dt - target) > 1e-13 else float(target)
            rho, u, T = prim(state)
            if np.any(~(rho > 0)) or np.any(~(T > 0)):
                return EulerResult(times[: len(states)], states, "positivity lost", t)
        rho, u, T = prim(state)
        states.append(FluidState(rho.copy(), u.copy(), T.copy()))
    return EulerResult(times, states, "ok", float(times[-1]))


def difference_fields(euler: FluidState, acoustic: AcousticState, delta: float) -> DifferenceState:
    """Second-order remainders of the Euler fields about the linear acoustic solution."""
    if not delta > 0:
        raise ConfigurationError("difference fields need delta > 0")
    d2 = delta**2
    return DifferenceState(
        (euler.rho - 1.0 - delta * acoustic.sigma) / d2,
        (euler.u - delta * acoustic.u) / d2,
        (euler.T - 1.0 - delta * acoustic.theta) / d2,
    )


def linearization_defect(euler: FluidState, acoustic: AcousticState, delta: float, sgrid: SpatialGrid, s: int = 2) -> float:
    """H^s norm of (rho - 1 - delta sigma, u - delta u, T - 1 - delta theta)."""
    stacked = np.concatenate([
        (euler.rho - 1.0 - delta * acoustic.sigma)[None],
        euler.u - delta * acoustic.u,
        (euler.T - 1.0 - delta * acoustic.theta)[None],
    ])
    return norm(stacked, sobolev(s), sgrid)


@dataclass(frozen=True)
class SymmetrizerReport:
    A0_spd: bool
    Ai_symmetric: bool
    min_A0_eig: float


def symmetrizer(state: FluidState) -> tuple[np.ndarray, np.ndarray]:
    """A0 with shape (*x, 5, 5) and A_i with shape (3, *x, 5, 5), unknowns ordered (sigma, u1, u2, u3, theta)."""
    state.validate()
    rho, u, T = state.rho, state.u, state.T
    shape = rho.shape
    A0 = np.zeros(shape + (5, 5))
    A0[..., 0, 0] = T / rho
    for j in range(3):
        A0[..., 1 + j, 1 + j] = rho
    A0[..., 4, 4] = 1.5 * rho / T
    A = np.zeros((3,) + shape + (5, 5))
    for i in range(3):
        A[i, ..., 0, 0] = T / rho * u[i]
        A[i, ..., 0, 1 + i] = T
        A[i, ..., 1 + i, 0] = T
        for j in range(3):
            A[i, ..., 1 + j, 1 + j] = rho * u[i]
        A[i, ..., 1 + i, 4] = rho
        A[i, ..., 4, 1 + i] = rho
        A[i, ..., 4, 4] = 1.5 * rho / T * u[i]
    return A0, A


def check_symmetrizer(state: FluidState) -> SymmetrizerReport:
    """Symmetry of each A_i and positive definiteness of A0 at every node."""
    A0, A = symmetrizer(state)
    eig = np.linalg.eigvalsh(A0)
    min_eig = float(np.min(eig))
    sym = bool(np.all(A == np.swapaxes(A, -1, -2)))
    return SymmetrizerReport(bool(min_eig > 0), sym, min_eig)
