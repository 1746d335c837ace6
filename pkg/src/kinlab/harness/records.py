"""Sweep records and their CSV form."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

HEADER = ("epsilon", "delta", "t", "quantity", "norm", "value", "status")
USABLE = ("ok", "flagged")


@dataclass(frozen=True)
class SweepRecord:
    """One measurement. ``status`` is "ok", "flagged" (inadmissible data, value kept) or "failed: <reason>"."""

    epsilon: float
    delta: float
    t: float
    quantity: str
    norm: str
    value: float
    status: str = "ok"

    def __post_init__(self):
        if self.status in USABLE and not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"{self.quantity}/{self.norm}: value must be finite and nonnegative, got {self.value}")

    @property
    def usable(self) -> bool:
        return self.status in USABLE

    @property
    def failed(self) -> bool:
        return self.status.startswith("failed")


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_csv(records, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for r in records:
            w.writerow([_fmt(r.epsilon), _fmt(r.delta), _fmt(r.t), r.quantity, r.norm, _fmt(r.value), r.status])


def read_csv(path) -> list[SweepRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != HEADER:
        raise ValueError(f"{path}: unexpected header {tuple(rows[0].keys())}")
    return [
        SweepRecord(float(r["epsilon"]), float(r["delta"]), float(r["t"]), r["quantity"], r["norm"], float(r["value"]), r["status"])
        for r in rows
    ]
