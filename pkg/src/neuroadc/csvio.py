"""CSV emission for spike trains, membranes, reconstructions and Monte Carlo runs.

Floats are written with ``repr`` so reading a file back recovers every value
exactly.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from .engine import SimTrace
from .recon import CompensationTable, MonteCarloReport, Reconstruction

HEADERS = {
    "spikes": ("step", "time_s", "row", "col", "id"),
    "membrane": ("step", "id", "v"),
    "reconstruction": ("window", "time_s", "count", "filtered", "estimate", "reference", "abs_error"),
    "montecarlo": ("trial", "seed", "rms_pct"),
    "compensation": ("count_norm", "input_norm"),
}


def _cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if hasattr(x, "item"):  # numpy scalar
        return _cell(x.item())
    return str(x)


def _rows(obj, kind: str) -> Iterable[tuple]:
    if kind == "spikes":
        for s in obj.spikes:
            yield s.step, s.time_seconds, s.row, s.col, s.id
    elif kind == "membrane":
        if obj.membrane is None:
            raise ValueError("trace has no membrane samples; run with record_membrane")
        for step, row in enumerate(obj.membrane):
            for nid, v in enumerate(row):
                yield step, nid, float(v)
    elif kind == "reconstruction":
        err = obj.abs_error
        for i in range(len(obj.count)):
            yield (i, float(obj.time_s[i]), int(obj.count[i]), float(obj.filtered[i]),
                   float(obj.estimate[i]), float(obj.reference[i]), float(err[i]))
    elif kind == "montecarlo":
        for i, rms in enumerate(obj.per_trial_rms_pct):
            yield i, obj.base_seed + i, float(rms)
    elif kind == "compensation":
        for x, y in obj.breakpoints:
            yield float(x), float(y)
    else:
        raise ValueError(f"unknown CSV kind {kind!r}")


def emit_csv(obj: SimTrace | Reconstruction | MonteCarloReport | CompensationTable, kind: str,
             path: str | Path) -> Path:
    """Write ``obj`` as CSV of the given ``kind``; returns the path written."""
    if kind not in HEADERS:
        raise ValueError(f"unknown CSV kind {kind!r}")
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(HEADERS[kind])
            for row in _rows(obj, kind):
                w.writerow([_cell(x) for x in row])
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
