"""Acceptance verdicts computed from sweep and operator-check records."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .fitting import fit_rate, sup_over_time

PASS, FAIL, INCOMPLETE = "pass", "fail", "incomplete"

DEFAULT_THRESHOLDS = {
    "energy_rtol": 1e-12,
    "expansion_slope": (2.0, 0.1),
    "expansion_r2": 0.999,
    "linearization_slope": (2.0, 0.15),
    "q_refinement": 3.0,
    "l_asymmetry": 1e-6,
    "null_dim": 5,
    "c0_spread": 0.2,
    "k_tolerance": 0.3,
    "euler_slope": (1.0, 0.15),
    "coupled_slope": (0.5, 0.1),
    "compat_euler": 5e-3,
    "compat_non_euler": 0.1,
}

TITLES = {
    "1": "acoustic energy identity",
    "2": "expansion defect rate in delta",
    "3": "linearization defect rate in delta",
    "4": "collision operator properties",
    "5": "K^m cutoff scaling",
    "6": "Euler limit rate in epsilon",
    "7a": "acoustic limit, coupled delta = sqrt(eps)",
    "7b": "acoustic limit, fixed eps floor / U-shape",
    "8": "Hilbert solvability residual",
}


class _Missing(Exception):
    pass


@dataclass(frozen=True)
class Verdict:
    criterion: str
    status: str
    measured: dict = field(default_factory=dict)
    detail: str = ""

    @property
    def title(self) -> str:
        return TITLES[self.criterion]

    def line(self) -> str:
        vals = ", ".join(f"{k}={_show(v)}" for k, v in self.measured.items())
        tail = f" [{self.detail}]" if self.detail else ""
        return f"{self.status.upper():10s} {self.criterion:3s} {self.title}: {vals}{tail}"


def _show(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    return str(v)


@dataclass(frozen=True)
class AcceptanceReport:
    verdicts: tuple[Verdict, ...]

    @property
    def exit_code(self) -> int:
        statuses = [v.status for v in self.verdicts]
        if not statuses:
            return 2
        if FAIL in statuses:
            return 1
        if INCOMPLETE in statuses:
            return 2
        return 0

    @property
    def overall(self) -> str:
        return {0: PASS, 1: FAIL, 2: INCOMPLETE}[self.exit_code]

    def lines(self) -> list[str]:
        return [v.line() for v in self.verdicts] + [f"overall: {self.overall}"]


_PARAM = re.compile(r"^(?P<name>[\w-]+)\[(?P<params>[^\]]*)\]$")


def parse_quantity(q: str) -> tuple[str, dict[str, str]]:
    """Split "name[k=v,k2=v2]" into its name and parameters."""
    m = _PARAM.match(q)
    if not m:
        return q, {}
    params = dict(p.split("=", 1) for p in m.group("params").split(",") if p)
    return m.group("name"), params


def _select(records, name: str, norm: str | None = None):
    out = []
    for r in records:
        base, params = parse_quantity(r.quantity)
        if base == name and (norm is None or r.norm == norm):
            out.append((r, params))
    return out


def _within(value: float, target: tuple[float, float]) -> bool:
    return abs(value - target[0]) <= target[1]


def _slope_series(records, quantity: str, norm: str, axis: str, keep=lambda e, d: True):
    series = {k: v for k, v in sup_over_time(records, quantity, norm).items() if keep(*k)}
    if len(series) < 3:
        raise _Missing(f"{quantity}/{norm}: {len(series)} run(s)")
    xs = [e if axis == "epsilon" else d for e, d in series]
    return fit_rate(xs, list(series.values())), series


def _crit1(records, th):
    rows = _select(records, "acoustic_energy_drift")
    if not rows:
        raise _Missing("no energy drift records")
    worst = max(r.value for r, _ in rows)
    ok = all(r.usable for r, _ in rows) and worst <= th["energy_rtol"]
    return ok, {"max_rel_drift": worst, "orders": len(rows)}, ""


def _crit2(records, th):
    measured, ok = {}, True
    for norm in ("Linf", "L2"):
        fit, _ = _slope_series(records, "expansion_defect", norm, "delta")
        measured[f"slope_{norm}"] = fit.slope
        measured[f"r2_{norm}"] = fit.r_squared
        ok &= _within(fit.slope, th["expansion_slope"]) and fit.r_squared >= th["expansion_r2"]
    return ok, measured, ""


def _crit3(records, th):
    fit, _ = _slope_series(records, "linearization_defect", "H2", "delta")
    return _within(fit.slope, th["linearization_slope"]), {"slope": fit.slope, "C2": fit.constant, "r2": fit.r_squared}, ""


def _crit4(records, th):
    q = sorted(((int(p["nv"]), r.value) for r, p in _select(records, "q_residual", "Linf")), key=lambda x: x[0])
    asym = [r.value for r, _ in _select(records, "l_asymmetry")]
    null = [int(r.value) for r, _ in _select(records, "null_dim")]
    c0 = sorted(((int(p["nv"]), r.value) for r, p in _select(records, "c0")), key=lambda x: x[0])
    if len(q) < 2 or not asym or not null or len(c0) < 2:
        raise _Missing("need q_residual at two resolutions, l_asymmetry, null_dim and c0 at two resolutions")
    ratio = q[0][1] / q[-1][1] if q[-1][1] > 0 else math.inf
    c_vals = [v for _, v in c0]
    spread = abs(c_vals[-1] - c_vals[0]) / abs(c_vals[0]) if c_vals[0] != 0 else math.inf
    ok = (ratio >= th["q_refinement"] and max(asym) <= th["l_asymmetry"] and all(n == th["null_dim"] for n in null)
          and min(c_vals) > 0 and spread <= th["c0_spread"])
    measured = {"tol_Q": [v for _, v in q], "refinement": ratio, "asymmetry": max(asym), "null_dim": null,
                "c0": c_vals, "c0_spread": spread}
    return ok, measured, ""


def _crit5(records, th):
    by_gamma: dict[float, list[tuple[float, float]]] = {}
    for r, p in _select(records, "k_cutoff"):
        by_gamma.setdefault(float(p["gamma"]), []).append((float(p["m"]), r.value))
    if not {0.0, 1.0} <= set(by_gamma):
        raise _Missing("need gamma = 0 and gamma = 1")
    measured, ok = {}, True
    for gamma in sorted(by_gamma):
        pts = sorted(by_gamma[gamma])
        if len(pts) < 3:
            raise _Missing(f"gamma={gamma}: fewer than three cutoff radii")
        fit = fit_rate(*zip(*pts))
        measured[f"exponent_gamma{gamma:g}"] = fit.slope
        ok &= abs(fit.slope - (3.0 + gamma)) <= th["k_tolerance"]
    return ok, measured, ""


def _crit6(records, th):
    fit, _ = _slope_series(records, "euler_defect", "L2", "epsilon")
    return _within(fit.slope, th["euler_slope"]), {"slope": fit.slope, "C_tau": fit.constant, "r2": fit.r_squared}, ""


def _coupled(e: float, d: float) -> bool:
    return abs(d - math.sqrt(e)) <= 1e-9 * d


def _crit7a(records, th):
    fit, _ = _slope_series(records, "acoustic_defect", "L2", "epsilon", keep=_coupled)
    return _within(fit.slope, th["coupled_slope"]), {"slope": fit.slope, "C": fit.constant, "r2": fit.r_squared}, ""


def _crit7b(records, th):
    series = {k: v for k, v in sup_over_time(records, "acoustic_defect", "L2").items() if not _coupled(*k)}
    groups: dict[float, list[tuple[float, float]]] = {}
    for (e, d), v in series.items():
        groups.setdefault(e, []).append((d, v))
    ladders = [(e, sorted(g, reverse=True)) for e, g in groups.items() if len(g) >= 3]
    if not ladders:
        raise _Missing("no fixed-epsilon delta ladder")
    eps, ladder = ladders[0]
    deltas, errs = np.array([d for d, _ in ladder]), np.array([v for _, v in ladder])
    i = int(np.argmin(errs))
    u_shape = 0 < i < len(errs) - 1 and errs[-1] > errs[i]
    # Floor: the smallest error against the eps/delta term at the smallest delta.
    floor_ratio = float(errs.min() / (eps / deltas.min()))
    measured = {"epsilon": eps, "deltas": list(deltas), "errors": list(errs), "argmin_delta": float(deltas[i]),
                "floor_over_eps_delta": floor_ratio}
    detail = "" if u_shape else "error decreases monotonically down the delta ladder; no interior minimum"
    return bool(u_shape), measured, detail


def _crit8(records, th):
    good = [r.value for r, p in _select(records, "compat_residual") if p.get("field") == "euler"]
    bad = [r.value for r, p in _select(records, "compat_residual") if p.get("field") == "non-euler"]
    if not good or not bad:
        raise _Missing("need compat residuals for an Euler and a non-Euler field")
    ok = max(good) <= th["compat_euler"] and min(bad) >= th["compat_non_euler"]
    return ok, {"euler": max(good), "non_euler": min(bad)}, ""


_EVALUATORS = {"1": _crit1, "2": _crit2, "3": _crit3, "4": _crit4, "5": _crit5, "6": _crit6,
               "7a": _crit7a, "7b": _crit7b, "8": _crit8}


def evaluate(criterion: str, records, thresholds=None) -> Verdict:
    th = {**DEFAULT_THRESHOLDS, **(thresholds or {})}
    failed = [r for r in records if r.failed]
    try:
        ok, measured, detail = _EVALUATORS[criterion](records, th)
    except _Missing as exc:
        note = f"; {len(failed)} failed row(s)" if failed else ""
        return Verdict(criterion, INCOMPLETE, {}, f"{exc}{note}")
    except ValueError as exc:
        return Verdict(criterion, INCOMPLETE, {}, str(exc))
    return Verdict(criterion, PASS if ok else FAIL, measured, detail)


def acceptance_report(records, thresholds=None, criteria=None) -> AcceptanceReport:
    """Verdict per criterion; an empty record list yields an incomplete report."""
    records = list(records)
    if not records:
        return AcceptanceReport(())
    names = list(_EVALUATORS) if criteria is None else list(criteria)
    return AcceptanceReport(tuple(evaluate(c, records, thresholds) for c in names))
