"""Phase-space grids and the discrete norms used throughout the package.

Space is a periodic box sampled uniformly (spectral derivatives). Velocity
space is a midpoint grid on the cube [-v_max, v_max]^3 with cell volume h^3.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class ConfigurationError(ValueError):
    """Invalid grid, kernel or run parameters."""


class ShapeError(ValueError):
    """Array shape does not match the grid it is measured on."""


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on prod_i [0, period_i)."""

    n_x: tuple[int, ...]
    period: tuple[float, ...]

    def __post_init__(self):
        if len(self.n_x) != len(self.period) or not 1 <= len(self.n_x) <= 3:
            raise ConfigurationError("dim_x must be 1, 2 or 3 with one period per axis")
        for n in self.n_x:
            if n < 4 or n % 2:
                raise ConfigurationError(f"n_x must be an even integer >= 4, got {n}")
        for p in self.period:
            if not p > 0:
                raise ConfigurationError(f"period must be positive, got {p}")

    @property
    def dim_x(self) -> int:
        return len(self.n_x)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.n_x)

    @property
    def dx(self) -> tuple[float, ...]:
        return tuple(p / n for p, n in zip(self.period, self.n_x))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.dx))

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(np.arange(n) * d for n, d in zip(self.n_x, self.dx))

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays, each of shape ``self.shape``."""
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Angular wavenumbers broadcastable against an fftn of a field."""
        ks = []
        for i, (n, p) in enumerate(zip(self.n_x, self.period)):
            k = 2.0 * np.pi * np.fft.fftfreq(n, d=p / n)
            shape = [1] * self.dim_x
            shape[i] = n
            ks.append(k.reshape(shape))
        return tuple(ks)

    @cached_property
    def k_squared(self) -> np.ndarray:
        return sum(k**2 for k in self.wavenumbers) * np.ones(self.shape)


@dataclass(frozen=True)
class VelocityGrid:
    """Midpoint grid with ``n_v`` nodes per axis on [-v_max, v_max]^3."""

    n_v: int
    v_max: float

    def __post_init__(self):
        if self.n_v < 2:
            raise ConfigurationError(f"n_v must be >= 2, got {self.n_v}")
        if not self.v_max > 0:
            raise ConfigurationError(f"v_max must be positive, got {self.v_max}")

    @property
    def h(self) -> float:
        return 2.0 * self.v_max / self.n_v

    @property
    def weight(self) -> float:
        return self.h**3

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_v,) * 3

    @property
    def size(self) -> int:
        return self.n_v**3

    @cached_property
    def nodes(self) -> np.ndarray:
        return -self.v_max + self.h * (np.arange(self.n_v) + 0.5)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.nodes, self.nodes, self.nodes, indexing="ij"))

    @cached_property
    def speed2(self) -> np.ndarray:
        v1, v2, v3 = self.mesh
        return v1**2 + v2**2 + v3**2

    @cached_property
    def ball(self) -> np.ndarray:
        """Mask of nodes with |v| <= v_max, the support used by the collision operator."""
        return self.speed2 <= self.v_max**2 * (1.0 + 1e-12)


def build_grids(
    n_x: int | tuple[int, ...] = 64,
    n_v: int = 24,
    v_max: float = 6.0,
    dim_x: int = 1,
    period: float | tuple[float, ...] = 2.0 * np.pi,
) -> tuple[SpatialGrid, VelocityGrid]:
    """Build the spatial and velocity grids.

    Scalars for ``n_x`` and ``period`` are repeated over ``dim_x`` axes.
    """
    if dim_x not in (1, 2, 3):
        raise ConfigurationError(f"dim_x must be 1, 2 or 3, got {dim_x}")
    if np.isscalar(n_x):
        n_x = (int(n_x),) * dim_x
    if np.isscalar(period):
        period = (float(period),) * dim_x
    if len(n_x) != dim_x or len(period) != dim_x:
        raise ConfigurationError("n_x and period need one entry per spatial axis")
    return SpatialGrid(tuple(int(n) for n in n_x), tuple(float(p) for p in period)), VelocityGrid(int(n_v), float(v_max))


@dataclass(frozen=True)
class NormKind:
    """Which norm to take. ``s`` is the Sobolev index, ``beta`` the velocity weight power."""

    tag: str
    s: int | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.tag not in ("L2", "Linf", "nu_L2", "Hs", "weighted_Linf"):
            raise ConfigurationError(f"unknown norm {self.tag!r}")
        if self.tag == "Hs" and (self.s is None or not 0 <= self.s <= 3):
            raise ConfigurationError("Sobolev index s must lie in 0..3")
        if self.tag == "weighted_Linf" and self.beta is None:
            raise ConfigurationError("weighted_Linf needs beta")

    @property
    def label(self) -> str:
        if self.tag == "Hs":
            return f"H{self.s}"
        return self.tag


L2 = NormKind("L2")
LINF = NormKind("Linf")
NU_L2 = NormKind("nu_L2")


def sobolev(s: int) -> NormKind:
    return NormKind("Hs", s=s)


def weighted_linf(beta: float) -> NormKind:
    return NormKind("weighted_Linf", beta=beta)


def _split_shape(field: np.ndarray, sgrid: SpatialGrid | None, vgrid: VelocityGrid | None):
    """Return (has_space, has_velocity) after checking the trailing axes."""
    shape = field.shape
    has_v = vgrid is not None and shape[-3:] == vgrid.shape
    rest = shape[:-3] if has_v else shape
    has_x = sgrid is not None and rest[-sgrid.dim_x:] == sgrid.shape if rest else False
    if not has_x and not has_v:
        raise ShapeError(f"field of shape {shape} matches neither grid")
    return has_x, has_v


def norm(
    field: np.ndarray,
    kind: NormKind,
    sgrid: SpatialGrid | None = None,
    vgrid: VelocityGrid | None = None,
    nu: np.ndarray | None = None,
) -> float:
    """Discrete norm of a field on space, velocity or phase space.

    Leading axes in front of the grid axes (components) are summed in the
    squared norms and maximised in the sup norms.
    """
    field = np.asarray(field, dtype=float)
    has_x, has_v = _split_shape(field, sgrid, vgrid)
    if not np.all(np.isfinite(field)):
        raise ValueError("field contains non-finite values")

    if kind.tag == "Linf":
        return float(np.max(np.abs(field)))
    if kind.tag == "weighted_Linf":
        if not has_v:
            raise ShapeError("weighted sup norm needs velocity axes")
        return float(np.max((1.0 + vgrid.speed2) ** kind.beta * np.abs(field)))

    dvol = 1.0
    if has_x:
        dvol *= sgrid.cell_volume
    if has_v:
        dvol *= vgrid.weight

    if kind.tag == "L2":
        return float(np.sqrt(np.sum(field**2) * dvol))
    if kind.tag == "nu_L2":
        if nu is None:
            raise ConfigurationError("nu_L2 needs the collision frequency")
        return float(np.sqrt(np.sum(nu * field**2) * dvol))

    # Sobolev norm through Fourier multipliers on the spatial axes.
    if not has_x:
        raise ShapeError("H^s norm needs spatial axes")
    lead = field.ndim - sgrid.dim_x - (3 if has_v else 0)
    axes = tuple(range(lead, lead + sgrid.dim_x))
    fhat = np.fft.fftn(field, axes=axes)
    mult = (1.0 + sgrid.k_squared) ** kind.s
    mult = mult.reshape(mult.shape + (1, 1, 1) if has_v else mult.shape)
    total = np.sum(mult * np.abs(fhat) ** 2) * dvol / np.prod(sgrid.shape)
    return float(np.sqrt(total))


def weighted_sup(
    field: np.ndarray,
    vgrid: VelocityGrid,
    beta: float,
    gamma: float = 1.0,
    mu_M: np.ndarray | None = None,
) -> float:
    """sup |(1+|v|^2)^beta field / sqrt(mu_M)|, with the weight exponent checked.

    ``beta`` must satisfy beta >= (9 - 2 gamma) / 2. When ``mu_M`` is omitted the
    field is taken to be already divided by sqrt(mu_M).
    """
    need = (9.0 - 2.0 * gamma) / 2.0
    if beta < need:
        raise ConfigurationError(f"beta={beta} below the admissible minimum {need} for gamma={gamma}")
    field = np.asarray(field, dtype=float)
    if field.shape[-3:] != vgrid.shape:
        raise ShapeError(f"field of shape {field.shape} has no velocity axes {vgrid.shape}")
    scaled = np.abs(field) * (1.0 + vgrid.speed2) ** beta
    if mu_M is not None:
        scaled = scaled / np.sqrt(mu_M)
    return float(np.max(scaled))
