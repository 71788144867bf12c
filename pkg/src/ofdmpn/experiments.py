"""experiments.py — single runs, parameter sweeps and trace generators.

One simulation point = (numerology row, branch delay, receiver mode, seed).
Seed fan-out deliberately excludes the row/delay/mode axes: every point of
one seed shares the same payload stream, pilot stream, phase-noise stream
prefix and noise stream, which turns cross-row and cross-delay comparisons
into paired (common-random-numbers) comparisons and stabilizes trend
statistics at small seed counts.  Any single point is reproducible
standalone from (seed, point parameters).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import PhaseTrace, apply_channel, gen_delayed_branch_phase, \
    gen_wiener_phase
from .compensation import MODES, estimate_cpe, estimate_slope_cp, ideal_channel, \
    interpolate_cpe_advanced, interpolate_cpe_baseline, run_receiver
from .metrics import RunMetrics, ber, evm_percent, phase_mse, welch_psd
from .ofdm import build_grid, demap_qpsk, demodulate, make_config, map_qpsk, \
    modulate, pilot_reference, ResourceGrid

#: All predefined numerologies share this sample rate.
SAMPLE_RATE_HZ = 245.76e6
#: Longest symbol (row 1) — reference length for the shared phase stream.
_MAX_SYMBOL_LEN = 8192 + 590
#: Branch delays used throughout, in seconds (CLI takes nanoseconds).
DEFAULT_DELAYS_S = (0.0, 96e-9, 240e-9, 480e-9, 672e-9, 912e-9)
#: Namespace tag so these seeds cannot collide with other uses of a master seed.
_SEED_DOMAIN = 0x0FD0


@dataclass
class SweepPlan:
    """Cartesian sweep definition; total runs = product of axis sizes."""

    config_rows: tuple = (1, 2, 3, 4, 5)
    delays_s: tuple = DEFAULT_DELAYS_S
    beta_hz: float = 150.0
    snr_db: float = float("inf")
    modes: tuple = MODES
    seeds: tuple = tuple(range(10))
    n_symbols: int = 20
    active_fraction: float = 0.8
    slope_estimator: str = "literal"

    def __post_init__(self):
        if not (self.config_rows and self.delays_s and self.modes and self.seeds):
            raise ValueError("sweep axes must be nonempty")
        bad = [m for m in self.modes if m not in MODES]
        if bad:
            raise ValueError(f"unknown modes {bad}; expected subset of {MODES}")
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")

    def points(self):
        """Deterministic run order: row, delay, mode rank, seed."""
        for row in sorted(self.config_rows):
            for delay in sorted(self.delays_s):
                for mode in sorted(self.modes, key=MODES.index):
                    for seed in self.seeds:
                        yield row, delay, mode, seed


def _seed_streams(seed: int):
    """Fan one master seed out into independent child streams."""
    ss = np.random.SeedSequence([_SEED_DOMAIN, int(seed)])
    phase_s, payload_s, pilot_s, noise_s = ss.spawn(4)
    return phase_s, payload_s, pilot_s, noise_s


def _frame_for(config, payload_seed, pilot_seed):
    bits = np.random.default_rng(payload_seed).integers(
        0, 2, size=config.bits_per_frame, dtype=np.uint8)
    grid = build_grid(config, map_qpsk(bits), pilot_seed)
    return bits, grid, modulate(grid, config)


def _phase_for(config, beta_hz, delay_s, phase_seed):
    """Delayed-branch phase over one frame, sliced from the shared base walk."""
    base_len = config.n_symbols * _MAX_SYMBOL_LEN
    base = gen_wiener_phase(beta_hz, base_len, config.sample_rate_hz, phase_seed)
    frame = PhaseTrace(base.phase_rad[:config.frame_len], config.sample_rate_hz)
    return gen_delayed_branch_phase(frame, delay_s)


def run_point(row: int, delay_s: float, mode: str, seed: int,
              beta_hz: float = 150.0, snr_db: float = float("inf"),
              n_symbols: int = 20, active_fraction: float = 0.8,
              slope_estimator: str = "literal", return_symbols: bool = False):
    """Simulate one frame end to end and return its RunMetrics.

    With return_symbols=True, returns (metrics, equalized data cells) so
    callers can plot the received constellation.
    """
    config = make_config(row, active_fraction=active_fraction,
                         n_symbols=n_symbols)
    phase_s, payload_s, pilot_s, noise_s = _seed_streams(seed)
    bits, grid, tx = _frame_for(config, payload_s, pilot_s)
    psi = _phase_for(config, beta_hz, delay_s, phase_s)
    rx = apply_channel(tx, psi, snr_db, noise_s)
    chan = ideal_channel(config)
    equalized, trace = run_receiver(rx, config, chan, mode,
                                    pilot_seed=pilot_s,
                                    slope_estimator=slope_estimator)

    rx_data = equalized.symbols[:, config.data_bins]
    tx_data = grid.symbols[:, config.data_bins]
    evm = evm_percent(rx_data, tx_data)
    bit_errors = ber(demap_qpsk(rx_data), bits)
    cpes = estimate_cpe(demodulate(rx, config), _pilot_grid(config, pilot_s),
                        chan, config)
    if trace is None:
        mse = mse_noedge = float("nan")
        edge_count = 0
    else:
        mse = phase_mse(trace, psi)
        mse_noedge = phase_mse(trace, psi, exclude_edges=True)
        edge_count = int(trace.edge_mask.sum()) if trace.edge_mask is not None else 0
    metrics = RunMetrics(
        evm_percent=evm,
        phase_mse_rad2=mse,
        phase_mse_excl_edges_rad2=mse_noedge,
        ber=bit_errors,
        per_symbol_cpe=cpes.cpe_rad,
        config_row=row,
        delay_s=delay_s,
        beta_hz=beta_hz,
        snr_db=snr_db,
        seed=seed,
        mode=mode,
        t_cp_s=config.cp_duration_s,
        sample_rate_hz=config.sample_rate_hz,
        edge_sample_count=edge_count,
    )
    if return_symbols:
        return metrics, rx_data
    return metrics


def _pilot_grid(config, pilot_seed) -> ResourceGrid:
    grid = ResourceGrid(
        np.zeros((config.n_symbols, config.fft_size), dtype=complex),
        config.pilot_bins.copy(), config.data_bins.copy())
    grid.symbols[:, config.pilot_bins] = pilot_reference(config, pilot_seed)
    return grid


def _run_point_args(args) -> RunMetrics:
    return run_point(*args)


def default_workers() -> int:
    """Worker count: OFDMPN_WORKERS environment variable, else 1 (serial)."""
    env = os.environ.get("OFDMPN_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"OFDMPN_WORKERS must be an integer, got {env!r}")
    return 1


def run_sweep(plan: SweepPlan, workers: int | None = None) -> list[RunMetrics]:
    """Run every sweep point; rows come back sorted by (row, delay, mode, seed).

    workers > 1 executes points in a process pool; results are identical to
    the serial path because the output order is the deterministic plan order.
    """
    if workers is None:
        workers = default_workers()
    args = [
        (row, delay, mode, seed, plan.beta_hz, plan.snr_db, plan.n_symbols,
         plan.active_fraction, plan.slope_estimator)
        for row, delay, mode, seed in plan.points()
    ]
    if workers <= 1:
        return [run_point(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(args) // (8 * workers))
        return list(pool.map(_run_point_args, args, chunksize=chunk))


def figure1_data(seed: int = 0, beta_hz: float = 150.0, n_symbols: int = 20,
                 slope_estimator: str = "literal") -> dict:
    """True phase vs both interpolated estimates on the fully active grid.

    Row-2 numerology, every subcarrier active, no AWGN — the setting where
    the two interpolators are compared sample by sample.  Returns the traces,
    the per-symbol CPE anchors, and both full-trace MSE values.
    """
    config = make_config(2, active_fraction=1.0, n_symbols=n_symbols)
    phase_s, payload_s, pilot_s, _ = _seed_streams(seed)
    _, _, tx = _frame_for(config, payload_s, pilot_s)
    base = gen_wiener_phase(beta_hz, config.frame_len, config.sample_rate_hz,
                            phase_s)
    rx = apply_channel(tx, base, float("inf"))
    chan = ideal_channel(config)
    cpes = estimate_cpe(demodulate(rx, config), _pilot_grid(config, pilot_s),
                        chan, config)
    slopes = estimate_slope_cp(rx, config, estimator=slope_estimator)
    baseline = interpolate_cpe_baseline(cpes, config)
    advanced = interpolate_cpe_advanced(cpes, slopes, config)
    nt = config.total_symbol_len
    return {
        "sample_index": np.arange(config.frame_len),
        "true_phase": base.phase_rad,
        "baseline_est": baseline.phase_rad,
        "advanced_est": advanced.phase_rad,
        "anchor_samples": (np.arange(n_symbols) + 0.5) * nt,
        "anchor_cpe": cpes.cpe_rad,
        "mse_baseline": phase_mse(baseline, base),
        "mse_advanced": phase_mse(advanced, base),
    }


def psd_data(beta_hz: float, delay_s: float, duration_s: float = 2e-3,
             seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Welch PSD of the delayed-branch phase process (or of the base walk
    itself when delay_s = 0, whose difference trace would be identically
    zero)."""
    n = round(duration_s * SAMPLE_RATE_HZ)
    segment = n // 8
    if segment < 16:
        raise ValueError(
            f"duration {duration_s} s is too short for a Welch estimate "
            "(needs at least 8 segments of 16+ samples)"
        )
    phase_s, _, _, _ = _seed_streams(seed)
    base = gen_wiener_phase(beta_hz, n, SAMPLE_RATE_HZ, phase_s)
    trace = base if delay_s == 0 else gen_delayed_branch_phase(base, delay_s)
    return welch_psd(trace, segment_len=segment, overlap_fraction=0.5)
