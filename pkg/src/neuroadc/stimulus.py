"""Input current waveforms shared by every neuron in the array."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np


class StimulusError(ValueError):
    pass


@dataclass(frozen=True)
class Sine:
    offset_amps: float
    peak_to_peak_amps: float
    frequency_hz: float
    phase_rad: float = 0.0

    def __post_init__(self):
        if not self.frequency_hz > 0:
            raise StimulusError("sine frequency must be > 0")
        if self.offset_amps - self.peak_to_peak_amps / 2 < 0:
            raise StimulusError("sine dips below 0 A; neuron input must be a rectified current")

    @property
    def period_seconds(self) -> float:
        return 1.0 / self.frequency_hz


@dataclass(frozen=True)
class Sawtooth:
    """Symmetric triangle: linear rise over the first half period, fall over the second."""

    min_amps: float
    max_amps: float
    period_seconds: float

    def __post_init__(self):
        if not self.period_seconds > 0:
            raise StimulusError("sawtooth period must be > 0")
        if self.min_amps < 0 or self.max_amps < self.min_amps:
            raise StimulusError("sawtooth needs 0 <= min_amps <= max_amps")


@dataclass(frozen=True)
class Constant:
    amps: float

    def __post_init__(self):
        if self.amps < 0:
            raise StimulusError("constant current must be >= 0")


@dataclass(frozen=True)
class Samples:
    values: tuple[float, ...]
    sample_period_seconds: float
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.sample_period_seconds > 0:
            raise StimulusError("sample period must be > 0")
        if not self.values:
            raise StimulusError("no samples")
        if min(self.values) < 0:
            raise StimulusError("samples must be >= 0")

    @property
    def horizon_seconds(self) -> float:
        return len(self.values) * self.sample_period_seconds


Waveform = Union[Sine, Sawtooth, Constant, Samples]


def period_of(w: Waveform) -> float | None:
    """Repetition period in seconds, or ``None`` for aperiodic waveforms."""
    if isinstance(w, Sine):
        return w.period_seconds
    if isinstance(w, Sawtooth):
        return w.period_seconds
    return None


def sample(w: Waveform, t: float) -> float:
    """Current in amperes at time ``t`` seconds."""
    if t < 0:
        raise StimulusError(f"t must be >= 0, got {t}")
    if isinstance(w, Constant):
        return w.amps
    if isinstance(w, Sine):
        return w.offset_amps + 0.5 * w.peak_to_peak_amps * math.sin(
            2 * math.pi * w.frequency_hz * t + w.phase_rad)
    if isinstance(w, Sawtooth):
        half = 0.5 * w.period_seconds
        phase = math.fmod(t, w.period_seconds)
        frac = phase / half if phase <= half else (w.period_seconds - phase) / half
        return w.min_amps + (w.max_amps - w.min_amps) * frac
    if isinstance(w, Samples):
        idx = math.floor(t / w.sample_period_seconds)
        if idx >= len(w.values):
            raise StimulusError(
                f"input exhausted: t={t:g} s is past the last of {len(w.values)} samples "
                f"({w.horizon_seconds:g} s)")
        return w.values[idx]
    raise TypeError(f"unknown waveform {w!r}")


def sample_many(w: Waveform, times: np.ndarray) -> np.ndarray:
    return np.array([sample(w, float(t)) for t in times])


def load_samples(path: str | Path, sample_period_seconds: float) -> Samples:
    """Read one ampere value per line from a plain text file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise StimulusError(f"cannot read {path}: {e}") from e
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            x = float(line)
        except ValueError:
            raise StimulusError(f"{path}:{lineno}: not a number: {line!r}") from None
        if not math.isfinite(x) or x < 0:
            raise StimulusError(f"{path}:{lineno}: current must be finite and >= 0, got {line}")
        values.append(x)
    if not values:
        raise StimulusError(f"{path}: no samples")
    return Samples(tuple(values), sample_period_seconds, source=str(path))
