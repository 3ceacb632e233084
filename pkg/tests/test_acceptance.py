"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary. Run alone with ``pytest tests/test_acceptance.py -s``.
"""
from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import ACCEPTANCE
from neuroadc.config import DEFAULTS, RAMP_CHARGE_GAIN, paper_ramp_10, paper_sine_50
from neuroadc.engine import NO_MISMATCH, Engine, calibrate_charge_gain, run, steps_per_period
from neuroadc.experiments import compensation_round_trip, decoherence_ab, decoherence_bench
from neuroadc.neuron import NeuronParams
from neuroadc.recon import apply_compensation, fit_compensation, monte_carlo, reconstruct
from neuroadc.scan import ScanConfig
from neuroadc.stimulus import Constant, Sawtooth


def report(tag: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_c1_decoherence_ab():
    t0 = time.perf_counter()
    on, off = decoherence_ab(decoherence_bench(seed=0, sweeps=500))
    elapsed = time.perf_counter() - t0
    ok = (off.burst_fraction >= 0.8 and on.burst_fraction <= 0.2
          and on.isi_cv <= 0.5 * off.isi_cv and elapsed < 1.0)
    report("1 decoherence A/B", ok,
           f"off burst={off.burst_fraction:.3f} (>=0.8) cv={off.isi_cv:.3f}; "
           f"on burst={on.burst_fraction:.3f} (<=0.2) cv={on.isi_cv:.3f} (<={0.5 * off.isi_cv:.3f}); "
           f"{elapsed:.2f}s (<1s)")


def test_c2_lif_period_oracle():
    t0 = time.perf_counter()
    scan = ScanConfig(1, 1, 30e-9, 10)
    neuron = NeuronParams(RAMP_CHARGE_GAIN, math.inf, 4e-6, math.inf, 2.0, scan.tick_seconds)
    worst = 0.0
    details = []
    for amps in (25e-9, 50e-9, 100e-9):
        expect = 1.0 / (RAMP_CHARGE_GAIN * amps)
        # a measured period is rounded up to whole steps; leave room for 101 firings
        steps = math.ceil(101 * (expect / scan.scan_step_seconds + 1))
        cfg = replace(paper_ramp_10().sim, scan=scan, neuron=neuron, waveform=Constant(amps),
                      duration_steps=steps)
        times = np.array([s.time_seconds for s in run(cfg).spikes])
        periods = np.diff(times)[:100]
        assert len(periods) == 100
        dev = float(np.max(np.abs(periods - expect)) / scan.scan_step_seconds)
        worst = max(worst, dev)
        details.append(f"{amps * 1e9:g}nA T={expect * 1e6:.4f}us max|dT|={dev:.3f} steps")
    elapsed = time.perf_counter() - t0
    report("2 LIF period oracle", worst <= 1.0 and elapsed < 1.0,
           "; ".join(details) + f"; {elapsed:.2f}s (<1s)")


def test_c3_calibration():
    sim = paper_ramp_10().sim
    target = 6.6e6
    t0 = time.perf_counter()
    gain = calibrate_charge_gain(target, sim)
    rate = run(sim.with_gain(gain)).mean_rate()
    elapsed = time.perf_counter() - t0
    rel = rate / target - 1
    report("3 calibration", abs(rel) <= 0.05 and elapsed < 30,
           f"charge_gain={gain:.6g}; verification over {sim.duration_steps} steps "
           f"{rate / 1e6:.4f} spikes/us ({rel:+.2%}, within 5%); {elapsed:.1f}s (<30s)")


def test_c4_sine_reconstruction():
    exp = paper_sine_50()
    t0 = time.perf_counter()
    rec = reconstruct(run(replace(exp.sim, mismatch=NO_MISMATCH)), exp.recon)
    elapsed = time.perf_counter() - t0
    report("4 sine reconstruction", rec.rms_pct <= 10 and elapsed < 30,
           f"held-out RMS error {rec.rms_pct:.3f}% (<=10%) over {len(rec.count) - rec.calib_windows} "
           f"windows; {elapsed:.1f}s (<30s)")


def test_c5_monte_carlo():
    exp = paper_sine_50()
    t0 = time.perf_counter()
    rep = monte_carlo(exp.sim, 30, exp.recon)
    elapsed = time.perf_counter() - t0
    worst = max(rep.per_trial_rms_pct)
    ok = 4 <= rep.mean_pct <= 12 and rep.std_pct <= 4 and worst <= 20 and elapsed < 300
    report("5 Monte Carlo", ok,
           f"30 trials mean={rep.mean_pct:.3f}% (in [4,12]) std={rep.std_pct:.3f}% (<=4) "
           f"max={worst:.3f}% (<=20); {elapsed:.1f}s (<300s)")


def test_c6_compensation_round_trip():
    res = compensation_round_trip(paper_ramp_10())
    # synthetic linear encoder: counts exactly proportional to input
    ref = np.linspace(0.0, 100e-9, 64)
    table = fit_compensation(ref * 4e8, ref, alpha=1.0)
    fresh = np.linspace(0.0, 100e-9, 257)
    recovered = apply_compensation(fresh * 4e8 / table.count_scale, table)
    ident = float(np.max(np.abs(recovered - fresh / 100e-9)))
    ok = res.monotone and res.max_abs_error <= 0.10 and ident <= 1e-6
    report("6 compensation round trip", ok,
           f"monotone={res.monotone} max|err|={res.max_abs_error:.4f} of full scale (<=0.10) "
           f"over {len(res.estimate)} windows; linear-encoder identity err={ident:.2e} (<=1e-6)")


def test_c7_invariant_suite():
    import engine_properties

    failures = []
    t0 = time.perf_counter()
    for name, prop in engine_properties.INVARIANTS:
        try:
            prop()
        except Exception as e:  # a falsified property
            failures.append(f"{name}: {type(e).__name__}")
    elapsed = time.perf_counter() - t0
    n = len(engine_properties.INVARIANTS)
    report("7 invariant suite", not failures,
           f"{n - len(failures)}/{n} properties hold over 1000 cases each ({elapsed:.0f}s)"
           + (f"; failed: {', '.join(failures)}" if failures else ""))


def test_c8_chip_scale_smoke():
    sim = replace(DEFAULTS.sim, waveform=Sawtooth(0.0, 100e-9, 50e-6), duration_steps=100_000)
    assert (sim.scan.rows, sim.scan.cols) == (7, 30)
    t0 = time.perf_counter()
    eng = Engine(sim)
    n, vmax = eng.n, sim.neuron.v_max
    violations = 0
    spikes = 0
    last_step = -1
    for k in range(sim.duration_steps):
        _, spike = eng.step()
        v = eng.v
        if v.min() < 0.0 or v.max() > vmax:
            violations += 1
        if spike is not None:
            spikes += 1
            if (spike.step != k or spike.step <= last_step or spike.id != k % n
                    or v[spike.id] != 0.0 or eng.flags[spike.id]):
                violations += 1
            last_step = spike.step
    elapsed = time.perf_counter() - t0
    report("8 7x30 smoke", violations == 0 and elapsed < 10 and spikes > 0,
           f"{sim.duration_steps} steps, {n} neurons, {spikes} spikes, {violations} violations; "
           f"{elapsed:.2f}s (<10s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))
