"""Command-line front end: ``fadline delay|experiment|bench``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from fadline import bench, report
from fadline.effects import LINE_KINDS, MOD_KINDS, ConfigError, EffectConfig, apply_effect
from fadline.wavio import WavFormatError, read_wav, write_wav

log = logging.getLogger("fadline")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fs", type=float, default=44100.0, help="sample rate in Hz (default 44100)")
    p.add_argument("--buffer", type=int, default=None, help="buffer size in samples (default: fs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fadline", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("delay", help="process a 16-bit mono WAV through a delay line")
    d.add_argument("input")
    d.add_argument("output", nargs="?")
    d.add_argument("--out", help="output WAV (alternative to the positional)")
    _common(d)
    d.add_argument("--line", choices=LINE_KINDS, default="fad")
    d.add_argument("--delay-s", type=float, default=2.0 / 3.0, help="base delay in seconds")
    d.add_argument("--mod", choices=MOD_KINDS, default="none")
    d.add_argument("--ramp-k", type=float, default=0.0, help="ramp rate, seconds per second")
    d.add_argument("--ramp-seconds", type=float, default=0.0)
    d.add_argument("--depth-s", type=float, default=0.0, help="sine/walk modulation depth, seconds")
    d.add_argument("--rate-hz", type=float, default=0.0, help="sine modulation rate")
    d.add_argument("--step-interval", type=int, default=100, help="walk: samples between targets")
    d.add_argument("--seed", type=int, default=None)

    e = sub.add_parser("experiment", help="regenerate an experiment dataset as CSV")
    e.add_argument("name", choices=report.EXPERIMENTS + ("all",))
    e.add_argument("--out", default="results", help="output directory")
    e.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    _common(e)

    b = sub.add_parser("bench", help="time FAD, FIR and FIR-without-increment kernels")
    b.add_argument("--sizes", type=int, nargs="+", default=None,
                   help="buffer sizes (default 2^10 .. 2^22)")
    b.add_argument("--ticks", type=int, default=bench.DEFAULT_TICKS)
    b.add_argument("--repetitions", type=int, default=bench.REPETITIONS)
    b.add_argument("--fast-floor", action="store_true", help="magic-number float-to-int conversion")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default="bench.csv")
    b.add_argument("--no-plots", action="store_true")
    return parser


def cmd_delay(args) -> int:
    out = args.out or args.output
    if not out:
        log.error("no output file given")
        return 2
    try:
        x, rate = read_wav(args.input)
    except (OSError, WavFormatError) as exc:
        log.error("%s", exc)
        return 3
    if abs(rate - args.fs) > 0.5:
        log.info("using the file's sample rate %d Hz", rate)
    try:
        cfg = EffectConfig(line=args.line, delay_s=args.delay_s, mod=args.mod, fs=float(rate),
                           buffer=args.buffer, ramp_k=args.ramp_k, ramp_seconds=args.ramp_seconds,
                           depth_s=args.depth_s, rate_hz=args.rate_hz,
                           step_interval=args.step_interval, seed=args.seed)
        y = apply_effect(cfg, x)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 4
    write_wav(out, y, rate)
    log.info("wrote %s (%d samples)", out, y.size)
    return 0


def cmd_experiment(args) -> int:
    names = report.EXPERIMENTS if args.name == "all" else (args.name,)
    for name in names:
        params = report.run_experiment(name, args.out, fs=args.fs, buffer=args.buffer,
                                       plots=not args.no_plots)
        log.info("%s: %s", name, ", ".join(f"{k}={v}" for k, v in params.items()))
    return 0


def cmd_bench(args) -> int:
    def progress(r):
        log.info("B=%d fad=%.2f fir=%.2f fir_no_inc=%.2f ns/sample caching=%.1f%%",
                 r.buffer_size, r.fad_ns, r.fir_ns, r.fir_no_increment_ns, r.caching_cost_pct)

    try:
        results = bench.run_bench(args.sizes, args.ticks, repetitions=args.repetitions,
                                  seed=args.seed, fast=args.fast_floor, progress=progress)
    except ValueError as exc:
        log.error("%s", exc)
        return 2
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    report.write_bench(results, args.out, plots=not args.no_plots)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    return {"delay": cmd_delay, "experiment": cmd_experiment, "bench": cmd_bench}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
