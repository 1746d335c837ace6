"""Flat binary snapshots with a text header.

Layout: ASCII lines ``key = value`` (always ``shape``, ``dtype``, ``t`` and
``quantity``, plus any grid parameters), a line ``END_HEADER``, then the array
as raw little-endian float64 in C order.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

_END = b"END_HEADER\n"


def write_snapshot(path, values: np.ndarray, t: float, quantity: str, **grid) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    meta = {"shape": ",".join(str(n) for n in values.shape), "dtype": "<f8", "t": "%.17g" % t, "quantity": quantity}
    meta.update({k: str(v) for k, v in grid.items()})
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        for k, v in meta.items():
            fh.write(f"{k} = {v}\n".encode("ascii"))
        fh.write(_END)
        fh.write(values.tobytes())


def read_snapshot(path) -> tuple[np.ndarray, dict[str, str]]:
    raw = Path(path).read_bytes()
    cut = raw.index(_END)
    meta = dict(line.split(" = ", 1) for line in raw[:cut].decode("ascii").splitlines())
    shape = tuple(int(n) for n in meta["shape"].split(",") if n)
    data = np.frombuffer(raw[cut + len(_END):], dtype=meta["dtype"]).reshape(shape)
    return data.copy(), meta
