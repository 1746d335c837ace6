"""Least-squares rates in log10-log10 coordinates."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..grid import ConfigurationError


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    @property
    def constant(self) -> float:
        """Prefactor C of the fitted law y = C x^slope."""
        return 10.0**self.intercept


def fit_rate(x, y) -> RateFit:
    """Fit log10 y = intercept + slope log10 x.

    Pairs with non-positive entries are dropped with a warning; fewer than
    three remaining points is an error.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ConfigurationError("x and y differ in length")
    keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if not np.all(keep):
        warnings.warn(f"dropping {int(np.sum(~keep))} non-positive point(s) from the rate fit", stacklevel=2)
    if int(np.sum(keep)) < 3:
        raise ConfigurationError(f"a rate fit needs at least 3 positive points, got {int(np.sum(keep))}")
    # Dividing by the first value keeps the slope bit-identical under scaling by powers of two.
    y0 = y[keep][0]
    lx, ly = np.log10(x[keep]), np.log10(y[keep] / y0)
    slope, shifted = np.polyfit(lx, ly, 1)
    intercept = shifted + np.log10(y0)
    resid = ly - (shifted + slope * lx)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), float(min(max(r2, 0.0), 1.0)), int(lx.size))


def fit_records(records, quantity: str, norm: str, x_axis: str = "epsilon") -> RateFit:
    """Rate of one (quantity, norm) series; several times per run are reduced by their maximum."""
    series = sup_over_time(records, quantity, norm)
    if x_axis == "epsilon":
        xs = [e for e, _ in series]
    elif x_axis == "delta":
        xs = [d for _, d in series]
    elif x_axis == "eps/delta":
        xs = [e / d for e, d in series]
    else:
        raise ConfigurationError(f"unknown x axis {x_axis!r}")
    return fit_rate(xs, list(series.values()))


def sup_over_time(records, quantity: str, norm: str) -> dict[tuple[float, float], float]:
    """Max over sampled times of each (epsilon, delta) run, in first-seen order."""
    out: dict[tuple[float, float], float] = {}
    for r in records:
        if r.quantity == quantity and r.norm == norm and r.usable:
            key = (r.epsilon, r.delta)
            out[key] = max(out.get(key, -np.inf), r.value)
    return out
