"""Row/column scan chains selecting one neuron per time step."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ScanConfig:
    """Array geometry and scan timing.

    Defaults follow the fabricated chip: 7 rows by 30 columns, a 33.3 MHz
    column shift (30 ns per step) and a 333 MHz inhibition generator
    (10 ticks per step).
    """

    rows: int = 7
    cols: int = 30
    scan_step_seconds: float = 30e-9
    gen_ticks_per_step: int = 10

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"rows and cols must be >= 1, got {self.rows}x{self.cols}")
        if not self.scan_step_seconds > 0:
            raise ValueError("scan_step_seconds must be > 0")
        if self.gen_ticks_per_step < 1:
            raise ValueError("gen_ticks_per_step must be >= 1")

    @property
    def n_neurons(self) -> int:
        return self.rows * self.cols

    @property
    def tick_seconds(self) -> float:
        return self.scan_step_seconds / self.gen_ticks_per_step


@dataclass(frozen=True)
class ScanCursor:
    row: int = 0
    col: int = 0

    def check(self, config: ScanConfig) -> None:
        if not (0 <= self.row < config.rows and 0 <= self.col < config.cols):
            raise ValueError(f"cursor {self} outside {config.rows}x{config.cols} array")


def advance(cursor: ScanCursor, config: ScanConfig) -> ScanCursor:
    """Shift the column chain; the row chain shifts when the columns wrap."""
    cursor.check(config)
    col = cursor.col + 1
    if col < config.cols:
        return ScanCursor(cursor.row, col)
    row = cursor.row + 1
    if row < config.rows:
        return ScanCursor(row, 0)
    return ScanCursor(0, 0)


def linear_id(cursor: ScanCursor, config: ScanConfig) -> int:
    cursor.check(config)
    return cursor.row * config.cols + cursor.col


def cursor_of(neuron_id: int, config: ScanConfig) -> ScanCursor:
    """Inverse of :func:`linear_id`."""
    if not 0 <= neuron_id < config.n_neurons:
        raise ValueError(f"neuron id {neuron_id} out of range")
    return ScanCursor(*divmod(neuron_id, config.cols))
