"""Clocked simulation of the scanned neuron array.

Every scan step runs the same five phases:

1. sample the shared input current,
2. deliver inhibition pulses due this step (lateral ones flag their target),
3. integrate every membrane over one step,
4. if the selected neuron is at threshold, spike and let the inhibition
   generator react,
5. advance the scan cursor.

Membranes are held in numpy arrays; the per-element arithmetic is the same
as :mod:`neuroadc.neuron` so a scalar replay reproduces a trace bit for bit.
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, replace

import numpy as np

from . import inhibition
from .inhibition import InhibitionPolicy, PulseEvent
from .neuron import THRESHOLD, NeuronParams, discharge
from .scan import ScanConfig, ScanCursor, advance, linear_id
from .stimulus import Constant, Samples, Waveform, period_of, sample

log = logging.getLogger(__name__)


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MismatchSpec:
    """Fixed per-neuron gain mismatch, drawn once per run.

    ``seed=None`` derives the mismatch stream from the run seed, so each
    Monte Carlo trial gets a fresh chip.
    """

    sigma_exc: float = 0.20
    sigma_inh: float = 0.30
    lo: float = 0.1
    hi: float = 2.0
    seed: int | None = None

    def __post_init__(self):
        if not (0 <= self.sigma_exc < 1 and 0 <= self.sigma_inh < 1):
            raise ValueError("mismatch sigmas must lie in [0, 1)")
        if not (0 < self.lo < 1 < self.hi):
            raise ValueError(f"mismatch bounds must satisfy 0 < lo < 1 < hi, got [{self.lo}, {self.hi}]")


NO_MISMATCH = MismatchSpec(0.0, 0.0)


@dataclass(frozen=True)
class SimConfig:
    scan: ScanConfig
    neuron: NeuronParams
    policy: InhibitionPolicy
    waveform: Waveform
    mismatch: MismatchSpec = NO_MISMATCH
    duration_steps: int = 1000
    seed: int = 0
    record_membrane: bool = False

    def __post_init__(self):
        if self.duration_steps < 1:
            raise ValueError("duration_steps must be >= 1")
        if not math.isclose(self.neuron.tick_seconds, self.scan.tick_seconds, rel_tol=1e-9):
            raise ValueError(
                f"neuron.tick_seconds {self.neuron.tick_seconds:g} does not match "
                f"scan_step_seconds / gen_ticks_per_step = {self.scan.tick_seconds:g}")
        self.policy.validate_for(self.scan.gen_ticks_per_step)

    @property
    def n_neurons(self) -> int:
        return self.scan.n_neurons

    def with_gain(self, charge_gain: float) -> SimConfig:
        return replace(self, neuron=replace(self.neuron, charge_gain=charge_gain))


@dataclass(frozen=True)
class SpikeEvent:
    step: int
    time_seconds: float
    row: int
    col: int
    id: int


@dataclass
class SimTrace:
    config: SimConfig
    spikes: list[SpikeEvent]
    g_exc: np.ndarray
    g_inh: np.ndarray
    input_current: np.ndarray
    membrane: np.ndarray | None = None
    pulses_delivered: int = 0

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def duration_steps(self) -> int:
        return self.config.duration_steps

    @property
    def duration_seconds(self) -> float:
        return self.config.duration_steps * self.config.scan.scan_step_seconds

    @property
    def spike_steps(self) -> np.ndarray:
        return np.fromiter((s.step for s in self.spikes), dtype=np.int64, count=len(self.spikes))

    def mean_rate(self) -> float:
        """Aggregate output rate in spikes per second."""
        return len(self.spikes) / self.duration_seconds


def inject_mismatch(spec: MismatchSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw (g_exc, g_inh) gain factors for ``n`` neurons.

    Factors are normal around 1 and redrawn until they fall inside
    ``[spec.lo, spec.hi]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _truncated_normal(spec.sigma_exc, spec, n, rng), _truncated_normal(spec.sigma_inh, spec, n, rng)


def _truncated_normal(sigma: float, spec: MismatchSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if sigma == 0:
        return np.ones(n)
    out = rng.normal(1.0, sigma, n)
    bad = (out < spec.lo) | (out > spec.hi)
    while bad.any():
        out[bad] = rng.normal(1.0, sigma, int(bad.sum()))
        bad = (out < spec.lo) | (out > spec.hi)
    return out


def rngs_for(config: SimConfig) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (mismatch, jitter) generators for a run."""
    mm_seed = config.mismatch.seed if config.mismatch.seed is not None else config.seed
    return np.random.default_rng([mm_seed, 0]), np.random.default_rng([config.seed, 1])


class Engine:
    """Mutable state of one run. Use :func:`run` unless stepping by hand."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.params = config.neuron
        self.n = config.n_neurons
        mismatch_rng, self.rng = rngs_for(config)
        self.g_exc, self.g_inh = inject_mismatch(config.mismatch, self.n, mismatch_rng)
        self.v = np.zeros(self.n)
        self.flags = np.zeros(self.n, dtype=bool)
        self.cursor = ScanCursor(0, 0)
        self.step_index = 0
        self.pending: dict[int, list[PulseEvent]] = defaultdict(list)
        self.pulses_delivered = 0

        dt = config.scan.scan_step_seconds
        self._dt = dt
        self._decay = self.params.decay(dt)
        self._cur = np.empty(self.n)

    def step(self) -> tuple[float, SpikeEvent | None]:
        """Advance one scan step; returns the input current and the spike, if any."""
        cfg, p = self.config, self.params
        k = self.step_index
        v = self.v

        i_in = sample(cfg.waveform, k * self._dt)

        for ev in self.pending.pop(k, ()):
            t = ev.target_id
            v[t] = discharge(float(v[t]), float(self.g_inh[t]), p, ev.width_ticks)
            if not ev.is_self_reset:
                self.flags[t] = True
            self.pulses_delivered += 1

        cur = self._cur
        np.multiply(self.g_exc, i_in, out=cur)
        np.minimum(cur, p.i_exc_max, out=cur)
        rise = p.charge_gain * cur * self._dt
        if self._decay != 1.0:
            v *= self._decay
        v += rise
        np.minimum(v, p.v_max, out=v)

        spike = None
        sel = linear_id(self.cursor, cfg.scan)
        if v[sel] >= THRESHOLD:
            spike = SpikeEvent(k, k * self._dt, self.cursor.row, self.cursor.col, sel)
            events = inhibition.handle_fire(bool(self.flags[sel]), cfg.policy, sel, k, self.n,
                                            self.rng, cfg.scan.gen_ticks_per_step)
            for ev in events:
                if ev.is_self_reset:
                    v[sel] = 0.0
                    self.pulses_delivered += 1
                else:
                    self.pending[ev.delivery_step].append(ev)
            self.flags[sel] = False

        self.cursor = advance(self.cursor, cfg.scan)
        self.step_index += 1
        return i_in, spike

    def run(self) -> SimTrace:
        cfg = self.config
        steps = cfg.duration_steps
        if isinstance(cfg.waveform, Samples):
            needed = (steps - 1) * self._dt
            if needed >= cfg.waveform.horizon_seconds:
                raise ValueError(
                    f"input exhausted: {steps} steps need {needed:g} s of samples, "
                    f"file covers {cfg.waveform.horizon_seconds:g} s")
        spikes = []
        currents = np.empty(steps)
        membrane = np.empty((steps, self.n)) if cfg.record_membrane else None
        for k in range(steps):
            currents[k], spike = self.step()
            if spike is not None:
                spikes.append(spike)
            if membrane is not None:
                membrane[k] = self.v
        return SimTrace(cfg, spikes, self.g_exc, self.g_inh, currents, membrane,
                        self.pulses_delivered)


def run(config: SimConfig) -> SimTrace:
    """Simulate ``config`` from rest; the trace is a pure function of the config."""
    return Engine(config).run()


def steps_per_period(config: SimConfig) -> int:
    period = period_of(config.waveform)
    if period is None:
        return config.duration_steps
    return math.ceil(period / config.scan.scan_step_seconds - 1e-9)


def mean_input(config: SimConfig) -> float:
    steps = steps_per_period(config)
    dt = config.scan.scan_step_seconds
    return float(np.mean([sample(config.waveform, k * dt) for k in range(steps)]))


def calibrate_charge_gain(target_rate: float, base_config: SimConfig, *, rel_tol: float = 0.01,
                          max_iter: int = 100) -> float:
    """Find the charge gain giving ``target_rate`` spikes/s over one input period.

    Brackets the target starting from the inhibition-free estimate
    ``target_rate / mean_input`` and then bisects in log space.
    """
    if not target_rate > 0:
        raise CalibrationError(f"target rate must be > 0, got {target_rate}")
    scan = base_config.scan
    ceiling = 1.0 / scan.scan_step_seconds
    if target_rate >= ceiling:
        raise CalibrationError(
            f"target {target_rate:g}/s is at or above the one-spike-per-step ceiling {ceiling:g}/s")
    cfg = replace(base_config, duration_steps=steps_per_period(base_config), record_membrane=False)

    cache: dict[float, float] = {}

    def rate(k: float) -> float:
        if k not in cache:
            cache[k] = run(cfg.with_gain(k)).mean_rate()
            log.debug("charge_gain=%.6g rate=%.6g", k, cache[k])
        return cache[k]

    i_mean = mean_input(cfg)
    if not i_mean > 0:
        raise CalibrationError("input is identically zero; no charge gain produces spikes")
    guess = target_rate / (cfg.n_neurons * i_mean)
    lo, hi = guess, guess
    for _ in range(40):
        if rate(lo) <= target_rate:
            break
        lo /= 2
    for _ in range(40):
        if rate(hi) >= target_rate:
            break
        hi *= 2
    r_lo, r_hi = rate(lo), rate(hi)
    if not (r_lo <= target_rate <= r_hi):
        raise CalibrationError(
            f"target {target_rate:g}/s not bracketed by charge_gain [{lo:g}, {hi:g}] "
            f"(rates {r_lo:g}, {r_hi:g})")
    for k in (lo, hi):
        if abs(rate(k) - target_rate) <= rel_tol * target_rate:
            return k
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        r = rate(mid)
        if abs(r - target_rate) <= rel_tol * target_rate:
            return mid
        if r < target_rate:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"bisection did not reach {rel_tol:.0%} of {target_rate:g}/s; bracket [{lo:g}, {hi:g}] "
        f"gives rates {rate(lo):g}, {rate(hi):g}")


def constant_input(config: SimConfig, amps: float) -> SimConfig:
    return replace(config, waveform=Constant(amps))
