"""Command-line front end: ``neuroadc <command> [--preset NAME | --config FILE] ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import csvio
from .config import PRESETS, ConfigError, ExperimentConfig, parse_config, render
from .engine import CalibrationError, run
from .experiments import compensation_round_trip, decoherence_ab
from .recon import ReconConfig, ReconError, monte_carlo, reconstruct
from .stimulus import Constant, StimulusError

log = logging.getLogger("neuroadc")

DEFAULT_TARGET_RATE = 6.6e6  # spikes per second


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in experiment")
    src.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--seed", type=int, help="run seed (default: the config's run.seed)")
    p.add_argument("--window", type=int, help="reconstruction window in scan steps")
    p.add_argument("--alpha", type=float, help="low-pass coefficient in (0, 1]")
    p.add_argument("--no-inhibition", action="store_true", help="disable lateral inhibition")
    p.add_argument("--constant", type=float, metavar="AMPS", help="replace the input by a constant current")
    p.add_argument("--duration", type=int, metavar="STEPS", help="override run.duration_steps")
    p.add_argument("--dump-config", type=Path, metavar="FILE", help="write the resolved configuration")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neuroadc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run and write the spike CSV")
    _common(p)
    p.add_argument("--out", type=Path, default=Path("spikes.csv"))
    p.add_argument("--record-membrane", action="store_true",
                   help="also write <out>_membrane.csv (step,id,v)")

    p = sub.add_parser("reconstruct", help="low-pass reconstruction and RMS error")
    _common(p)
    p.add_argument("--out", type=Path, default=Path("reconstruction.csv"))

    p = sub.add_parser("compensate", help="fit the ramp compensation table")
    _common(p)
    p.add_argument("--out", type=Path, default=Path("compensation.csv"))

    p = sub.add_parser("calibrate-gain", help="find the charge gain for a target output rate")
    _common(p)
    p.add_argument("--target", type=float, default=DEFAULT_TARGET_RATE,
                   help="aggregate spikes per second (default 6.6e6)")

    p = sub.add_parser("montecarlo", help="repeat reconstruction over fresh mismatch draws")
    _common(p)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("montecarlo.csv"))

    p = sub.add_parser("decohere", help="ISI statistics with inhibition on and off")
    _common(p)
    return parser


def resolve(args) -> ExperimentConfig:
    if args.config is not None:
        exp = parse_config(args.config)
    else:
        exp = parse_config(args.preset or "paper-ramp-10")
    sim, recon = exp.sim, exp.recon
    if args.seed is not None:
        sim = replace(sim, seed=args.seed)
    if args.constant is not None:
        sim = replace(sim, waveform=Constant(args.constant))
    if args.no_inhibition:
        sim = replace(sim, policy=replace(sim.policy, enabled=False))
    if args.duration is not None:
        sim = replace(sim, duration_steps=args.duration)
    if getattr(args, "record_membrane", False):
        sim = replace(sim, record_membrane=True)
    if args.window is not None or args.alpha is not None:
        recon = ReconConfig(args.window if args.window is not None else recon.window_steps,
                            args.alpha if args.alpha is not None else recon.alpha,
                            recon.calib_fraction)
    exp = ExperimentConfig(sim, recon)
    if args.dump_config is not None:
        args.dump_config.write_text(render(exp))
    return exp


def cmd_simulate(args, exp: ExperimentConfig) -> None:
    trace = run(exp.sim)
    csvio.emit_csv(trace, "spikes", args.out)
    print(f"{len(trace.spikes)} spikes in {exp.sim.duration_steps} steps "
          f"({trace.mean_rate() / 1e6:.4g} spikes/us) -> {args.out}")
    if exp.sim.record_membrane:
        mpath = args.out.with_name(args.out.stem + "_membrane.csv")
        csvio.emit_csv(trace, "membrane", mpath)
        print(f"membrane samples -> {mpath}")


def cmd_reconstruct(args, exp: ExperimentConfig) -> None:
    rec = reconstruct(run(exp.sim), exp.recon)
    csvio.emit_csv(rec, "reconstruction", args.out)
    print(f"rms_error_pct={rec.rms_pct:.4f} held_out_windows={len(rec.count) - rec.calib_windows} "
          f"window_steps={rec.window_steps} -> {args.out}")


def cmd_compensate(args, exp: ExperimentConfig) -> None:
    res = compensation_round_trip(exp)
    csvio.emit_csv(res.table, "compensation", args.out)
    print(f"breakpoints={len(res.table.breakpoints)} max_abs_error={res.max_abs_error:.4f} "
          f"monotone={str(res.monotone).lower()} -> {args.out}")


def cmd_calibrate(args, exp: ExperimentConfig) -> None:
    from .engine import calibrate_charge_gain

    gain = calibrate_charge_gain(args.target, exp.sim)
    print(f"charge_gain={gain!r}")


def cmd_montecarlo(args, exp: ExperimentConfig) -> None:
    report = monte_carlo(exp.sim, args.trials, exp.recon, workers=args.workers)
    csvio.emit_csv(report, "montecarlo", args.out)
    print(f"trials={report.n_trials} base_seed={report.base_seed} mean_rms_pct={report.mean_pct:.4f} "
          f"std_rms_pct={report.std_pct:.4f} max_rms_pct={max(report.per_trial_rms_pct):.4f} -> {args.out}")


def cmd_decohere(args, exp: ExperimentConfig) -> None:
    print("inhibition,isi_cv,burst_fraction,spikes")
    for row in decoherence_ab(exp.sim):
        print(f"{'on' if row.inhibition else 'off'},{row.isi_cv!r},{row.burst_fraction!r},{row.n_spikes}")


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "compensate": cmd_compensate,
    "calibrate-gain": cmd_calibrate,
    "montecarlo": cmd_montecarlo,
    "decohere": cmd_decohere,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        exp = resolve(args)
        COMMANDS[args.command](args, exp)
    except (ConfigError, StimulusError, ReconError, CalibrationError, ValueError, OSError,
            RuntimeError) as e:
        print(f"neuroadc {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
