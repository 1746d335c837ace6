"""Sweep configuration and its INI file form.

Example::

    [sweep]
    kind = acoustic-limit          ; expansion | linearization | euler-limit | acoustic-limit
    epsilons = 1e-2, 2.5e-3, 6.25e-4
    delta_rule = coupled           ; fixed | coupled
    coupling_exponent = 0.5        ; delta = epsilon**m when coupled
    deltas = 0.1                   ; used when fixed
    tau = 1.0
    sample_times = 0.25, 0.5, 0.75, 1.0
    norms = L2, Linf
    admissibility = flag           ; strict aborts, flag keeps the rows marked "flagged"
    workers = 1
    output = results/acoustic.csv
    snapshot_dir = results/snapshots   ; optional kinetic snapshot dumps

    [grid]
    n_x = 64
    n_v = 24
    v_max = 6.0
    dim_x = 1

    [kinetic]
    backend = bgk
    scheme = imex
    dt = 5e-3
    rate_model = constant
    nu0 = 1.0
    gamma = 1.0

    [data]
    a = 1.0
    b = 1.0

Every key is optional; the values shown are the defaults except ``kind``,
``epsilons`` and ``deltas``, which default to an expansion sweep over
0.2, 0.1, 0.05, 0.025.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, fields
from pathlib import Path

from ..grid import ConfigurationError

KINDS = ("expansion", "linearization", "euler-limit", "acoustic-limit")
KINETIC_KINDS = ("euler-limit", "acoustic-limit")


@dataclass(frozen=True)
class SweepConfig:
    kind: str = "expansion"
    epsilons: tuple[float, ...] = ()
    delta_rule: str = "fixed"
    deltas: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    coupling_exponent: float = 0.5
    tau: float = 1.0
    sample_times: tuple[float, ...] = (1.0,)
    norms: tuple[str, ...] = ("L2", "Linf")
    admissibility: str = "flag"
    workers: int = 1
    output: str | None = None
    snapshot_dir: str | None = None
    n_x: int = 64
    n_v: int = 24
    v_max: float = 6.0
    dim_x: int = 1
    backend: str = "bgk"
    scheme: str = "imex"
    dt: float = 5e-3
    rate_model: str = "constant"
    nu0: float = 1.0
    gamma: float = 1.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown sweep kind {self.kind!r}; expected one of {KINDS}")
        if self.delta_rule not in ("fixed", "coupled"):
            raise ConfigurationError(f"delta_rule must be fixed or coupled, got {self.delta_rule!r}")
        if any(not e > 0 for e in self.epsilons):
            raise ConfigurationError("every epsilon must be positive")
        if self.kind in KINETIC_KINDS and not self.epsilons:
            raise ConfigurationError(f"a {self.kind} sweep needs at least one epsilon")
        if self.delta_rule == "coupled":
            if not 0 < self.coupling_exponent < 1:
                raise ConfigurationError("the coupling exponent must lie in (0, 1)")
            if self.kind not in KINETIC_KINDS:
                raise ConfigurationError("coupled delta needs a kinetic sweep")
        elif not self.deltas or any(not 0 < d < 1 for d in self.deltas):
            raise ConfigurationError("deltas must be a nonempty list in (0, 1)")
        if any(not 0 <= t <= self.tau for t in self.sample_times) or not self.sample_times:
            raise ConfigurationError("sample times must lie in [0, tau]")
        if self.admissibility not in ("strict", "flag"):
            raise ConfigurationError("admissibility must be strict or flag")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")

    def pairs(self) -> list[tuple[float, float]]:
        """(epsilon, delta) runs in output order; fluid-only sweeps carry epsilon = 0."""
        if self.kind not in KINETIC_KINDS:
            return [(0.0, d) for d in self.deltas]
        if self.delta_rule == "coupled":
            return [(e, e**self.coupling_exponent) for e in self.epsilons]
        return [(e, d) for e in self.epsilons for d in self.deltas]


_SECTIONS = {
    "sweep": ("kind", "epsilons", "delta_rule", "deltas", "coupling_exponent", "tau", "sample_times", "norms",
              "admissibility", "workers", "output", "snapshot_dir"),
    "grid": ("n_x", "n_v", "v_max", "dim_x"),
    "kinetic": ("backend", "scheme", "dt", "rate_model", "nu0", "gamma"),
    "data": ("a", "b"),
}


def _convert(name: str, raw: str):
    kind = {f.name: f.type for f in fields(SweepConfig)}[name]
    try:
        if kind.startswith("tuple[float"):
            return tuple(float(x) for x in raw.replace(",", " ").split())
        if kind.startswith("tuple[str"):
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{name}: cannot parse {raw!r}") from exc
    return raw.strip()


def load_config(path, **overrides) -> SweepConfig:
    """Read an INI file; unknown sections or keys are configuration errors."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not parser.read(Path(path)):
        raise ConfigurationError(f"cannot read config file {path}")
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown section [{section}]")
        for key, raw in parser[section].items():
            if key not in _SECTIONS[section]:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]")
            values[key] = _convert(key, raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**values)


def criterion_configs(name: str) -> list[SweepConfig]:
    """The sweeps behind each rate criterion at their stated parameters."""
    ladder = (0.2, 0.1, 0.05, 0.025)
    times = (0.25, 0.5, 0.75, 1.0)
    table = {
        "expansion": [SweepConfig(kind="expansion", deltas=ladder)],
        "linearization": [SweepConfig(kind="linearization", deltas=ladder)],
        "euler-limit": [SweepConfig(kind="euler-limit", epsilons=(4e-3, 2e-3, 1e-3, 5e-4), deltas=(0.1,))],
        "acoustic-limit": [
            SweepConfig(kind="acoustic-limit", epsilons=(1e-2, 2.5e-3, 6.25e-4), delta_rule="coupled",
                        coupling_exponent=0.5, sample_times=times),
            SweepConfig(kind="acoustic-limit", epsilons=(1e-3,), deltas=(0.4, 0.2, 0.1, 0.05), sample_times=times),
        ],
    }
    if name not in table:
        raise ConfigurationError(f"no default sweep for {name!r}")
    return table[name]
