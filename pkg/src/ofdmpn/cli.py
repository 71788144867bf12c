"""cli.py — `ofdmpn` command line: simulate, sweep, psd, figure1.

Every command that writes a CSV also renders a PNG figure next to it
(same basename) unless --no-plot is given.  Exit codes: 0 success,
1 usage error, 2 runtime failure.  Identical invocations produce
byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .experiments import (
    DEFAULT_DELAYS_S,
    SweepPlan,
    default_workers,
    figure1_data,
    psd_data,
    run_point,
    run_sweep,
)
from .compensation import MODES
from .metrics import RunMetrics
from .waveform_io import _fmt, write_metrics_csv


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1 (not argparse's 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_seeds(text: str):
    """--seeds accepts a count ("30" -> seeds 0..29) or a comma list ("1,5,9")."""
    try:
        if "," in text:
            return tuple(int(t) for t in text.split(",") if t != "")
        return tuple(range(int(text)))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer count or comma-separated list, got {text!r}"
        )


def _png_path(out_path: str) -> str:
    return os.path.splitext(out_path)[0] + ".png"


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def build_parser() -> _Parser:
    parser = _Parser(prog="ofdmpn",
                     description="OFDM phase-noise simulation experiments")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p, single_point: bool):
        p.add_argument("--beta-hz", type=float, default=150.0,
                       help="oscillator two-sided 3-dB linewidth [Hz]")
        p.add_argument("--n-symbols", type=int, default=20,
                       help="OFDM symbols per frame")
        p.add_argument("--full-active", action="store_true",
                       help="occupy every subcarrier instead of 80%%")
        p.add_argument("--slope-estimator", choices=("literal", "robust"),
                       default="literal",
                       help="per-pair angle mean, or angle of the summed products")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--no-plot", action="store_true",
                       help="skip rendering the PNG next to the CSV")
        if single_point:
            p.add_argument("--seed", type=int, default=0)

    p_sim = sub.add_parser("simulate", help="run one frame and print metrics")
    p_sim.add_argument("--config-row", type=int, choices=range(1, 6), default=2)
    p_sim.add_argument("--delay-ns", type=float, default=0.0,
                       help="branch delay [ns]")
    p_sim.add_argument("--snr-db", type=float, default=float("inf"))
    p_sim.add_argument("--mode", choices=MODES, default="standard")
    common(p_sim, single_point=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="cartesian sweep to CSV")
    p_sweep.add_argument("--config-row", type=int, choices=range(1, 6),
                         action="append", dest="config_rows",
                         help="repeatable; default all rows 1..5")
    p_sweep.add_argument("--delay-ns", type=float, action="append",
                         dest="delays_ns",
                         help="repeatable; default 0, 96, 240, 480, 672, 912")
    p_sweep.add_argument("--snr-db", type=float, default=float("inf"))
    p_sweep.add_argument("--mode", choices=MODES, action="append",
                         dest="modes", help="repeatable; default all modes")
    p_sweep.add_argument("--seeds", type=_parse_seeds, default=tuple(range(10)),
                         help='count ("30") or comma list ("1,5,9"); default 10')
    p_sweep.add_argument("--workers", type=int, default=None,
                         help="process count; default $OFDMPN_WORKERS or 1")
    common(p_sweep, single_point=False)
    p_sweep.set_defaults(func=cmd_sweep)

    p_psd = sub.add_parser("psd", help="phase-noise PSD to CSV")
    p_psd.add_argument("--delay-ns", type=float, default=912.0)
    p_psd.add_argument("--duration-s", type=float, default=2e-3,
                       help="trace duration [s]")
    common(p_psd, single_point=True)
    p_psd.set_defaults(func=cmd_psd)

    p_f1 = sub.add_parser(
        "figure1",
        help="true phase vs interpolated estimates on the full-active grid")
    common(p_f1, single_point=True)
    p_f1.set_defaults(func=cmd_figure1)

    return parser


def cmd_simulate(args) -> int:
    metrics, rx_data = run_point(
        args.config_row, args.delay_ns * 1e-9, args.mode, args.seed,
        beta_hz=args.beta_hz, snr_db=args.snr_db, n_symbols=args.n_symbols,
        active_fraction=1.0 if args.full_active else 0.8,
        slope_estimator=args.slope_estimator, return_symbols=True)
    for name in RunMetrics.CSV_FIELDS:
        print(f"{name}: {_fmt(getattr(metrics, name))}")
    if args.out:
        _ensure_parent(args.out)
        write_metrics_csv([metrics], args.out)
        if not args.no_plot:
            from . import plotting
            plotting.render_constellation(rx_data, _png_path(args.out))
    return 0


def cmd_sweep(args) -> int:
    if not args.out:
        raise ValueError("sweep requires --out")
    delays_ns = args.delays_ns or [d * 1e9 for d in DEFAULT_DELAYS_S]
    plan = SweepPlan(
        config_rows=tuple(sorted(set(args.config_rows or (1, 2, 3, 4, 5)))),
        delays_s=tuple(sorted(d * 1e-9 for d in delays_ns)),
        beta_hz=args.beta_hz,
        snr_db=args.snr_db,
        modes=tuple(args.modes or MODES),
        seeds=args.seeds,
        n_symbols=args.n_symbols,
        active_fraction=1.0 if args.full_active else 0.8,
        slope_estimator=args.slope_estimator,
    )
    workers = args.workers if args.workers is not None else default_workers()
    rows = run_sweep(plan, workers=workers)
    _ensure_parent(args.out)
    write_metrics_csv(rows, args.out)
    if not args.no_plot:
        from . import plotting
        plotting.render_sweep(rows, _png_path(args.out))
    return 0


def cmd_psd(args) -> int:
    if not args.out:
        raise ValueError("psd requires --out")
    freqs, psd = psd_data(args.beta_hz, args.delay_ns * 1e-9,
                          duration_s=args.duration_s, seed=args.seed)
    _ensure_parent(args.out)
    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["freq_hz", "psd_rad2_per_hz"])
        for fr, p in zip(freqs, psd):
            writer.writerow([_fmt(float(fr)), _fmt(float(p))])
    if not args.no_plot:
        from . import plotting
        plotting.render_psd(
            freqs, psd, _png_path(args.out),
            title=f"delay {args.delay_ns:.0f} ns, beta {args.beta_hz:.0f} Hz")
    return 0


def cmd_figure1(args) -> int:
    if not args.out:
        raise ValueError("figure1 requires --out")
    data = figure1_data(seed=args.seed, beta_hz=args.beta_hz,
                        n_symbols=args.n_symbols,
                        slope_estimator=args.slope_estimator)
    print(f"mse_baseline: {_fmt(data['mse_baseline'])}")
    print(f"mse_advanced: {_fmt(data['mse_advanced'])}")
    _ensure_parent(args.out)
    anchor_at = {int(np.floor(s)): c for s, c in
                 zip(data["anchor_samples"], data["anchor_cpe"])}
    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["sample_index", "true_phase_rad", "baseline_est_rad",
                         "advanced_est_rad", "cpe_anchor_rad"])
        for i in range(len(data["sample_index"])):
            anchor = _fmt(anchor_at[i]) if i in anchor_at else ""
            writer.writerow([
                i,
                _fmt(float(data["true_phase"][i])),
                _fmt(float(data["baseline_est"][i])),
                _fmt(float(data["advanced_est"][i])),
                anchor,
            ])
    if not args.no_plot:
        from . import plotting
        plotting.render_figure1(data, _png_path(args.out))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:  # runtime failures -> exit 2
        print(f"ofdmpn: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
