"""metrics.py — EVM, phase-estimation MSE, BER and Welch PSD.

All functions are pure; RunMetrics is the record one simulation run
produces (consumed by the CSV writer and the CLI).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .channel import PhaseTrace


@dataclass
class RunMetrics:
    """Metrics plus provenance for a single simulated frame.

    phase_mse_rad2 fields are NaN for the standard receiver mode, which
    produces no phase estimate.
    """

    evm_percent: float
    phase_mse_rad2: float
    phase_mse_excl_edges_rad2: float
    ber: float
    per_symbol_cpe: np.ndarray
    config_row: int
    delay_s: float
    beta_hz: float
    snr_db: float
    seed: int
    mode: str
    t_cp_s: float = 0.0
    sample_rate_hz: float = 0.0
    edge_sample_count: int = 0

    CSV_FIELDS = (
        "config_row", "delay_s", "beta_hz", "snr_db", "seed", "mode",
        "evm_percent", "phase_mse_rad2", "phase_mse_excl_edges_rad2", "ber",
        "t_cp_s", "sample_rate_hz", "edge_sample_count",
    )


def evm_percent(rx_syms, ref_syms) -> float:
    """Error vector magnitude: 100 * sqrt(mean|rx-ref|^2 / mean|ref|^2)."""
    rx = np.asarray(rx_syms).ravel()
    ref = np.asarray(ref_syms).ravel()
    if rx.size == 0:
        raise ValueError("EVM of empty input is undefined")
    if rx.size != ref.size:
        raise ValueError(f"length mismatch: {rx.size} vs {ref.size}")
    return 100.0 * float(np.sqrt(np.mean(np.abs(rx - ref) ** 2)
                                 / np.mean(np.abs(ref) ** 2)))


def phase_mse(estimate: PhaseTrace, truth: PhaseTrace,
              exclude_edges: bool = False) -> float:
    """Mean squared error between two phase traces, in rad^2.

    With exclude_edges=True, samples flagged by the estimate's edge_mask
    (constant-fallback regions of the baseline interpolator) are dropped.
    """
    est = np.asarray(estimate.phase_rad)
    tru = np.asarray(truth.phase_rad)
    if est.size != tru.size:
        raise ValueError(f"length mismatch: {est.size} vs {tru.size}")
    if exclude_edges and estimate.edge_mask is not None:
        keep = ~estimate.edge_mask
        if not np.any(keep):
            raise ValueError("no samples left after excluding edges")
        est = est[keep]
        tru = tru[keep]
    return float(np.mean((est - tru) ** 2))


def welch_psd(trace: PhaseTrace, segment_len: int,
              overlap_fraction: float = 0.5):
    """One-sided Hann-windowed Welch PSD of a phase trace, rad^2/Hz.

    Density scaling: the PSD integrated over frequency matches the variance
    of the mean-detrended trace (up to windowing loss).
    """
    x = np.asarray(trace.phase_rad)
    if not 1 <= segment_len <= x.size:
        raise ValueError(
            f"segment_len must be in [1, {x.size}], got {segment_len}"
        )
    if not 0.0 <= overlap_fraction < 1.0:
        raise ValueError("overlap_fraction must be in [0, 1)")
    freqs, psd = sps.welch(
        x,
        fs=trace.sample_rate_hz,
        window="hann",
        nperseg=segment_len,
        noverlap=int(segment_len * overlap_fraction),
        detrend="constant",
        return_onesided=True,
        scaling="density",
    )
    return freqs, psd


def ber(rx_bits, tx_bits) -> float:
    """Fraction of differing bits."""
    rx = np.asarray(rx_bits).ravel()
    tx = np.asarray(tx_bits).ravel()
    if rx.size != tx.size:
        raise ValueError(f"length mismatch: {rx.size} vs {tx.size}")
    if rx.size == 0:
        raise ValueError("BER of empty input is undefined")
    return float(np.mean(rx != tx))
