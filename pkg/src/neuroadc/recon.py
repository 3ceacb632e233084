"""Reconstruction of the input from spike counts, and the metrics around it.

Two decoding paths are provided:

* low-pass: windowed spike counts -> single-pole smoothing -> affine map to
  amperes fitted on a calibration segment;
* compensation: the smoothed ramp response, normalized to its maximum, is
  made monotone by pool-adjacent-violators and inverted into a lookup table.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .engine import SimConfig, SimTrace, run

log = logging.getLogger(__name__)


class ReconError(ValueError):
    pass


@dataclass(frozen=True)
class ReconConfig:
    """Decoder settings. ``window_steps=None`` means one full array sweep."""

    window_steps: int | None = None
    alpha: float = 0.1
    calib_fraction: float = 0.5

    def __post_init__(self):
        if self.window_steps is not None and self.window_steps < 1:
            raise ValueError("window_steps must be >= 1")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 < self.calib_fraction < 1:
            raise ValueError("calib_fraction must lie in (0, 1)")

    def window_for(self, config: SimConfig) -> int:
        return self.window_steps if self.window_steps is not None else config.n_neurons


@dataclass(frozen=True)
class CountSeries:
    window_steps: int
    values: np.ndarray
    start_time_seconds: float = 0.0


@dataclass(frozen=True)
class CompensationTable:
    """Monotone map from normalized spike count to normalized input.

    ``count_scale`` is the smoothed count that maps to 1.0 and ``ref_lo`` /
    ``ref_hi`` undo the input normalization.
    """

    breakpoints: tuple[tuple[float, float], ...]
    count_scale: float = 1.0
    ref_lo: float = 0.0
    ref_hi: float = 1.0

    def __post_init__(self):
        xs = [x for x, _ in self.breakpoints]
        ys = [y for _, y in self.breakpoints]
        if len(xs) < 2:
            raise ReconError("compensation table needs at least two breakpoints")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ReconError("breakpoint counts must be strictly increasing")
        if any(b < a for a, b in zip(ys, ys[1:])):
            raise ReconError("compensation table must be monotone non-decreasing")

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.breakpoints])

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.breakpoints])


@dataclass(frozen=True)
class MonteCarloReport:
    per_trial_rms_pct: tuple[float, ...]
    mean_pct: float
    std_pct: float
    n_trials: int
    base_seed: int


@dataclass(frozen=True)
class Reconstruction:
    """Per-window decoder output; ``rms_pct`` is measured on the held-out windows."""

    window_steps: int
    time_s: np.ndarray
    count: np.ndarray
    filtered: np.ndarray
    estimate: np.ndarray
    reference: np.ndarray
    gain: float
    offset: float
    calib_windows: int
    rms_pct: float

    @property
    def abs_error(self) -> np.ndarray:
        return np.abs(self.estimate - self.reference)


def spike_counts(trace: SimTrace, window_steps: int) -> CountSeries:
    """Spikes per consecutive window; a trailing partial window is dropped."""
    if window_steps < 1:
        raise ValueError("window_steps must be >= 1")
    n_windows = trace.duration_steps // window_steps
    steps = trace.spike_steps
    steps = steps[steps < n_windows * window_steps]
    values = np.bincount(steps // window_steps, minlength=n_windows).astype(np.int64)
    return CountSeries(window_steps, values, 0.0)


def lowpass(series, alpha: float) -> np.ndarray:
    """Single-pole smoother ``y[t] = alpha*x[t] + (1-alpha)*y[t-1]`` with ``y[0] = x[0]``."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    x = np.asarray(series.values if isinstance(series, CountSeries) else series, dtype=float)
    y = np.empty_like(x)
    if x.size == 0:
        return y
    acc = y[0] = x[0]
    keep = 1.0 - alpha
    for i in range(1, x.size):
        acc = alpha * x[i] + keep * acc
        y[i] = acc
    return y


def affine_fit(series, reference) -> tuple[float, float]:
    """Least-squares ``(a, b)`` minimizing ``sum((a*series + b - reference)**2)``."""
    x = np.asarray(series, dtype=float)
    r = np.asarray(reference, dtype=float)
    if x.shape != r.shape or x.ndim != 1 or x.size < 2:
        raise ReconError("affine_fit needs two equal-length 1-D series of length >= 2")
    if np.ptp(x) == 0:
        raise ReconError("cannot fit an affine map to a constant series")
    design = np.column_stack([x, np.ones_like(x)])
    (a, b), *_ = np.linalg.lstsq(design, r, rcond=None)
    return float(a), float(b)


def rms_error_pct(estimate, reference) -> float:
    e = np.asarray(estimate, dtype=float)
    r = np.asarray(reference, dtype=float)
    if e.shape != r.shape or r.size < 1:
        raise ReconError("estimate and reference must have equal non-zero length")
    ref_rms = math.sqrt(float(np.mean(r * r)))
    if ref_rms == 0:
        raise ReconError("reference has zero RMS")
    return 100.0 * math.sqrt(float(np.mean((e - r) ** 2))) / ref_rms


def window_reference(trace: SimTrace, window_steps: int) -> np.ndarray:
    """Mean input current over each complete window."""
    n_windows = trace.duration_steps // window_steps
    cur = trace.input_current[:n_windows * window_steps]
    return cur.reshape(n_windows, window_steps).mean(axis=1)


def reconstruct(trace: SimTrace, recon: ReconConfig = ReconConfig()) -> Reconstruction:
    """Low-pass decode ``trace``; fit the affine scale on the leading windows, score the rest."""
    window = recon.window_for(trace.config)
    counts = spike_counts(trace, window)
    n = counts.values.size
    n_cal = int(n * recon.calib_fraction)
    if n_cal < 2 or n - n_cal < 1:
        raise ReconError(f"run too short: {n} windows of {window} steps")
    filtered = lowpass(counts, recon.alpha)
    reference = window_reference(trace, window)
    a, b = affine_fit(filtered[:n_cal], reference[:n_cal])
    estimate = a * filtered + b
    rms = rms_error_pct(estimate[n_cal:], reference[n_cal:])
    dt = trace.config.scan.scan_step_seconds
    time_s = np.arange(n) * window * dt
    return Reconstruction(window, time_s, counts.values, filtered, estimate, reference,
                          a, b, n_cal, rms)


def pava(y, weights=None) -> list[tuple[float, float, int, int]]:
    """Pool adjacent violators for a non-decreasing fit.

    Returns blocks ``(value, weight, start, stop)``; adjacent blocks have
    strictly increasing values.
    """
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)
    blocks: list[list] = []
    for i, (yi, wi) in enumerate(zip(y, w)):
        blocks.append([yi * wi, wi, i, i + 1])
        while len(blocks) > 1 and blocks[-2][0] / blocks[-2][1] >= blocks[-1][0] / blocks[-1][1]:
            s, ww, _, stop = blocks.pop()
            blocks[-1][0] += s
            blocks[-1][1] += ww
            blocks[-1][3] = stop
    return [(s / ww, ww, start, stop) for s, ww, start, stop in blocks]


def fit_compensation(ramp_counts, ramp_reference, alpha: float = 0.1) -> CompensationTable:
    """Invert the smoothed, max-normalized spike-count response to a rising ramp.

    ``alpha=1`` skips smoothing.
    """
    counts = np.asarray(ramp_counts.values if isinstance(ramp_counts, CountSeries) else ramp_counts,
                        dtype=float)
    ref = np.asarray(ramp_reference, dtype=float)
    if counts.shape != ref.shape or counts.size < 2:
        raise ReconError("ramp counts and reference must have equal length >= 2")
    if not counts.any():
        raise ReconError("ramp produced no spikes; nothing to invert")
    smooth = lowpass(counts, alpha)
    scale = float(smooth.max())
    norm = smooth / scale
    ref_lo, ref_hi = float(ref.min()), float(ref.max())
    if ref_hi == ref_lo:
        raise ReconError("reference ramp is constant")
    ref_norm = (ref - ref_lo) / (ref_hi - ref_lo)

    points = []
    for value, _, start, stop in pava(norm):
        points.append((value, float(ref_norm[start:stop].mean())))
    if len(points) == 1:
        raise ReconError("spike-count response is flat over the ramp")
    if points[0][0] > 0.0:
        points.insert(0, (0.0, points[0][1]))
    if points[-1][0] < 1.0:
        points.append((1.0, points[-1][1]))
    return CompensationTable(tuple(points), scale, ref_lo, ref_hi)


def apply_compensation(series, table: CompensationTable) -> np.ndarray:
    """Map normalized counts through the table; values outside [0, 1] clamp to its ends."""
    x = np.clip(np.asarray(series, dtype=float), 0.0, 1.0)
    return np.interp(x, table.x, table.y)


def compensate_counts(counts, table: CompensationTable, alpha: float = 0.1) -> np.ndarray:
    """Smooth fresh counts, normalize by the table's scale, and apply it (normalized output)."""
    c = counts.values if isinstance(counts, CountSeries) else counts
    return apply_compensation(lowpass(c, alpha) / table.count_scale, table)


def decoherence_metrics(trace: SimTrace, scan_step_seconds: float | None = None) -> tuple[float, float]:
    """``(isi_cv, burst_fraction)`` of the pooled output spike train.

    A burst interval is one of at most two scan steps.
    """
    if len(trace.spikes) < 3:
        raise ReconError(f"need at least 3 spikes, got {len(trace.spikes)}")
    step = trace.config.scan.scan_step_seconds
    unit = scan_step_seconds if scan_step_seconds is not None else step
    # integer step differences keep uniform trains exactly uniform
    isi = np.diff(trace.spike_steps).astype(float)
    if unit != step:
        isi *= step / unit
    cv = float(isi.std() / isi.mean())
    burst = float(np.mean(isi <= 2 + 1e-9))
    return cv, burst


def _trial(args) -> float:
    config, recon, trial = args
    try:
        return reconstruct(run(config), recon).rms_pct
    except Exception as e:
        raise RuntimeError(f"trial {trial} (seed {config.seed}) failed: {e}") from e


def monte_carlo(config: SimConfig, n_trials: int, recon: ReconConfig = ReconConfig(),
                workers: int = 1) -> MonteCarloReport:
    """Repeat the low-pass pipeline with seeds ``config.seed + i`` (a fresh chip per trial)."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    jobs = [(replace(config, seed=config.seed + i, record_membrane=False), recon, i)
            for i in range(n_trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(_trial, jobs))
    else:
        errors = [_trial(job) for job in jobs]
    arr = np.array(errors)
    log.info("monte carlo: %d trials, mean %.3f%%, std %.3f%%", n_trials, arr.mean(), arr.std())
    return MonteCarloReport(tuple(float(e) for e in errors), float(arr.mean()), float(arr.std()),
                            n_trials, config.seed)
