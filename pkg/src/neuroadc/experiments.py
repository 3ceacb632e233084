"""Desk-scale experiment drivers shared by the CLI and the acceptance tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import ExperimentConfig, SCAN_STEP, GEN_TICKS
from .engine import NO_MISMATCH, SimConfig, SimTrace, run, steps_per_period
from .inhibition import InhibitionPolicy
from .neuron import NeuronParams
from .recon import (CompensationTable, ReconError, compensate_counts, decoherence_metrics,
                    fit_compensation)
from .scan import ScanConfig
from .stimulus import Constant, Sawtooth


def decoherence_bench(seed: int = 0, sweeps: int = 500, amps: float = 50e-9,
                      sweeps_per_spike: float = 20.0) -> SimConfig:
    """Ten identical neurons on a constant input with the default inhibition policy.

    ``charge_gain`` is set so a lone neuron at ``amps`` would fire once every
    ``sweeps_per_spike`` sweeps; clamps are the circuit values (800 nA, 4 uA).
    """
    scan = ScanConfig(1, 10, SCAN_STEP, GEN_TICKS)
    gain = 1.0 / (amps * sweeps_per_spike * scan.n_neurons * scan.scan_step_seconds)
    neuron = NeuronParams(gain, 800e-9, 4e-6, math.inf, 2.0, scan.tick_seconds)
    return SimConfig(scan, neuron, InhibitionPolicy(), Constant(amps), NO_MISMATCH,
                     sweeps * scan.n_neurons, seed, False)


@dataclass(frozen=True)
class DecoherenceRow:
    inhibition: bool
    isi_cv: float
    burst_fraction: float
    n_spikes: int


def decoherence_ab(config: SimConfig) -> tuple[DecoherenceRow, DecoherenceRow]:
    """Run ``config`` with lateral inhibition enabled and disabled."""
    rows = []
    for enabled in (True, False):
        cfg = replace(config, policy=replace(config.policy, enabled=enabled))
        trace = run(cfg)
        cv, burst = decoherence_metrics(trace, cfg.scan.scan_step_seconds)
        rows.append(DecoherenceRow(enabled, cv, burst, len(trace.spikes)))
    return rows[0], rows[1]


@dataclass(frozen=True)
class CompensationResult:
    table: CompensationTable
    estimate: np.ndarray
    reference: np.ndarray
    trace: SimTrace

    @property
    def max_abs_error(self) -> float:
        return float(np.abs(self.estimate - self.reference).max())

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.estimate) >= 0))


def rising_segment(trace: SimTrace, start: int, n_steps: int, window: int):
    """Windowed spike counts and mean input over ``[start, start + n_steps)``."""
    n = n_steps // window
    if n < 2:
        raise ReconError(f"segment of {n_steps} steps holds fewer than two {window}-step windows")
    steps = trace.spike_steps
    steps = steps[(steps >= start) & (steps < start + n * window)] - start
    counts = np.bincount(steps // window, minlength=n)
    ref = trace.input_current[start:start + n * window].reshape(n, window).mean(axis=1)
    return counts, ref


def compensation_round_trip(exp: ExperimentConfig) -> CompensationResult:
    """Fit the compensation table on one triangle period and apply it to the next.

    A first period is simulated and discarded so the fit does not see the
    charge-up from rest. Only the rising half of each period is used; the
    returned estimate and reference are normalized to the fitted input range.
    """
    sim = exp.sim
    if not isinstance(sim.waveform, Sawtooth):
        raise ReconError("compensation needs a sawtooth (triangle) input")
    period = steps_per_period(sim)
    trace = run(replace(sim, duration_steps=3 * period, record_membrane=False))
    window = exp.recon.window_for(sim)
    half = period // 2
    c_fit, r_fit = rising_segment(trace, period, half, window)
    c_new, r_new = rising_segment(trace, 2 * period, half, window)
    table = fit_compensation(c_fit, r_fit, exp.recon.alpha)
    estimate = compensate_counts(c_new, table, exp.recon.alpha)
    reference = (r_new - table.ref_lo) / (table.ref_hi - table.ref_lo)
    return CompensationResult(table, estimate, reference, trace)
