"""compensation.py — pilot-aided phase estimation, interpolation and equalization.

Per OFDM symbol the receiver measures the common phase error (CPE) as the
angle of the pilot-cell inner product sum_k Y_k * conj(H_k * X_k).  Two
per-sample phase reconstructions are built from it:

* baseline: piecewise-linear interpolation between consecutive symbols'
  CPE anchors (needs the next symbol's CPE, so it lags by one symbol and
  falls back to a constant at the frame edges);
* advanced: an independent line per symbol, slope taken from the phase
  drift between each cyclic-prefix sample and its tail copy one FFT
  length later (no lookahead).

`run_receiver` wires these into the full chain: the standard mode rotates
each symbol by its measured CPE inside the equalization stage, while the
interpolating modes correct the time-domain signal, re-demodulate and
apply the plain zero-forcing equalizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import MAGNITUDE_EPS, PhaseTrace
from .ofdm import OfdmConfig, ResourceGrid, TimeSignal, demodulate, pilot_reference

MODES = ("standard", "baseline_licpe", "advanced_licpe")


@dataclass
class ChannelEstimate:
    """Frequency response per FFT bin; only active bins are meaningful."""

    h: np.ndarray


@dataclass
class CpeSeries:
    """One common-phase-error value per OFDM symbol, radians.

    `anchor_sample` is the integer sample offset within the symbol where the
    value nominally applies (floor of the symbol midpoint, CP included); the
    interpolators use the exact midpoint total_symbol_len/2.
    """

    cpe_rad: np.ndarray
    anchor_sample: int


@dataclass
class SlopeSeries:
    """Per-symbol phase slope, radians per sample."""

    slope_rad_per_sample: np.ndarray


def ideal_channel(config: OfdmConfig) -> ChannelEstimate:
    return ChannelEstimate(np.ones(config.fft_size, dtype=complex))


def estimate_channel_ls(rx_grid: ResourceGrid, tx_grid: ResourceGrid,
                        config: OfdmConfig) -> ChannelEstimate:
    """Least-squares estimate h = Y/X per active cell from one known symbol.

    Uses the first symbol of the grids; intended for a phase-noise-free
    preamble.  Guard bins are set to 1.
    """
    h = np.ones(config.fft_size, dtype=complex)
    bins = config.active_bins
    x = tx_grid.symbols[0, bins]
    if np.any(np.abs(x) < MAGNITUDE_EPS):
        raise ValueError("preamble symbol has (near-)zero active cells")
    h[bins] = rx_grid.symbols[0, bins] / x
    return ChannelEstimate(h)


def estimate_cpe(rx_grid: ResourceGrid, tx_pilots: ResourceGrid,
                 chan: ChannelEstimate, config: OfdmConfig) -> CpeSeries:
    """Per-symbol common phase error from the pilot-cell inner product.

    CPE_m = angle( sum over pilot bins of Y * conj(H * X) ).
    """
    if len(rx_grid.pilot_bins) == 0:
        raise ValueError("empty pilot set")
    if not np.array_equal(rx_grid.pilot_bins, tx_pilots.pilot_bins):
        raise ValueError("pilot masks of rx and tx grids do not agree")
    bins = rx_grid.pilot_bins
    m = rx_grid.n_symbols
    y = rx_grid.symbols[:, bins]
    x = tx_pilots.symbols[:m, bins]
    s = np.sum(y * np.conj(chan.h[bins] * x), axis=1)
    return CpeSeries(np.angle(s), config.total_symbol_len // 2)


def estimate_slope_cp(rx_time: TimeSignal, config: OfdmConfig,
                      estimator: str = "literal") -> SlopeSeries:
    """Per-symbol phase slope from CP/tail sample pairs.

    Each cyclic-prefix sample r[i] is a copy of r[i+N] transmitted N samples
    apart, so angle(r[i+N] * conj(r[i])) measures the phase drift over one
    FFT length.  "literal" averages the per-pair principal-value angles and
    divides by N; "robust" takes the angle of the summed products instead
    (less sensitive to noisy low-magnitude pairs).  Valid when the per-pair
    drift stays inside (-pi, pi].  Pairs with either sample magnitude below
    1e-12 are skipped and the divisor reduced accordingly.
    """
    if config.cp_len_samples < 1:
        raise ValueError("slope estimation requires a nonzero cyclic prefix")
    if estimator not in ("literal", "robust"):
        raise ValueError(f"unknown estimator {estimator!r}")
    nt = config.total_symbol_len
    n = config.fft_size
    samples = np.asarray(rx_time.samples)
    if len(samples) % nt:
        raise ValueError(
            f"signal length {len(samples)} is not a multiple of {nt}"
        )
    sym = samples.reshape(-1, nt)
    head = sym[:, :config.cp_len_samples]
    tail = sym[:, n:]
    valid = (np.abs(head) >= MAGNITUDE_EPS) & (np.abs(tail) >= MAGNITUDE_EPS)
    n_valid = valid.sum(axis=1)
    if np.any(n_valid == 0):
        bad = int(np.nonzero(n_valid == 0)[0][0])
        raise ValueError(
            f"all CP sample pairs of symbol {bad} are below the magnitude "
            "threshold; slope is undefined"
        )
    products = tail * np.conj(head)
    if estimator == "literal":
        terms = np.where(valid, np.angle(products), 0.0)
        slopes = terms.sum(axis=1) / (n_valid * n)
    else:
        s = np.where(valid, products, 0.0).sum(axis=1)
        slopes = np.angle(s) / n
    return SlopeSeries(slopes)


def interpolate_cpe_baseline(cpes: CpeSeries, config: OfdmConfig) -> PhaseTrace:
    """Piecewise-linear phase through consecutive CPE anchors.

    Anchors sit at the (continuous) midpoint of each symbol; samples of the
    first symbol before its anchor and of the last symbol after its anchor
    take the nearest CPE as a constant and are flagged in `edge_mask`.  The
    CPE series is unwrapped first so accumulated rotation beyond pi
    interpolates correctly.
    """
    cpe = np.asarray(cpes.cpe_rad, dtype=float)
    if len(cpe) < 2:
        raise ValueError("baseline interpolation needs at least 2 symbols")
    nt = config.total_symbol_len
    anchors = (np.arange(len(cpe)) + 0.5) * nt
    t = np.arange(len(cpe) * nt, dtype=float)
    trace = np.interp(t, anchors, np.unwrap(cpe))
    edge = (t < anchors[0]) | (t > anchors[-1])
    return PhaseTrace(trace, config.sample_rate_hz, edge_mask=edge)


def interpolate_cpe_advanced(cpes: CpeSeries, slopes: SlopeSeries,
                             config: OfdmConfig) -> PhaseTrace:
    """Independent line per symbol: slope_m * (k - N_T/2) + CPE_m.

    k runs over the samples of the symbol (CP included); no information
    crosses symbol boundaries, so the estimate needs no lookahead.
    """
    cpe = np.asarray(cpes.cpe_rad, dtype=float)
    slope = np.asarray(slopes.slope_rad_per_sample, dtype=float)
    if len(cpe) != len(slope):
        raise ValueError(
            f"series length mismatch: {len(cpe)} CPEs vs {len(slope)} slopes"
        )
    nt = config.total_symbol_len
    k = np.arange(nt) - nt / 2.0
    trace = (slope[:, None] * k[None, :] + cpe[:, None]).ravel()
    return PhaseTrace(trace, config.sample_rate_hz)


def compensate(rx_time: TimeSignal, estimate: PhaseTrace) -> TimeSignal:
    """Remove an estimated phase trajectory: out[n] = in[n] * e^{-j est[n]}."""
    x = np.asarray(rx_time.samples)
    if len(x) != len(estimate.phase_rad):
        raise ValueError(
            f"signal length {len(x)} != estimate length {len(estimate.phase_rad)}"
        )
    return TimeSignal(x * np.exp(-1j * estimate.phase_rad), rx_time.sample_rate_hz)


def zf_equalize(rx_grid: ResourceGrid, chan: ChannelEstimate) -> ResourceGrid:
    """Zero-forcing: divide active cells by the channel estimate.

    Guard cells are left untouched.
    """
    bins = np.concatenate([rx_grid.pilot_bins, rx_grid.data_bins])
    h = chan.h[bins]
    if np.any(np.abs(h) < MAGNITUDE_EPS):
        raise ValueError("channel estimate is singular on an active cell")
    out = rx_grid.symbols.copy()
    out[:, bins] = out[:, bins] / h
    return ResourceGrid(out, rx_grid.pilot_bins.copy(), rx_grid.data_bins.copy())


def _rotate_per_symbol(grid: ResourceGrid, angles: np.ndarray) -> ResourceGrid:
    sym = grid.symbols * np.exp(-1j * angles)[:, None]
    return ResourceGrid(sym, grid.pilot_bins.copy(), grid.data_bins.copy())


def run_receiver(rx_time: TimeSignal, config: OfdmConfig, chan: ChannelEstimate,
                 mode: str, *, pilot_seed: int,
                 slope_estimator: str = "literal"
                 ) -> tuple[ResourceGrid, PhaseTrace | None]:
    """Full receive chain for one frame.

    standard:        demodulate, rotate each symbol by its pilot-measured
                     CPE, zero-forcing equalize.  (A per-symbol pilot-aided
                     equalizer absorbs the CPE; returns no phase trace.)
    baseline_licpe:  demodulate, estimate CPEs, interpolate across symbols,
                     de-rotate the time signal, demodulate again, equalize.
    advanced_licpe:  as baseline but with an independent line per symbol,
                     slope taken from the cyclic prefix.

    Returns the equalized grid and the per-sample phase estimate used
    (None for standard mode).  `pilot_seed` must match the transmitter's.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    tx_pilots = ResourceGrid(
        np.zeros((config.n_symbols, config.fft_size), dtype=complex),
        config.pilot_bins.copy(), config.data_bins.copy())
    tx_pilots.symbols[:, config.pilot_bins] = pilot_reference(config, pilot_seed)

    first = demodulate(rx_time, config)
    cpes = estimate_cpe(first, tx_pilots, chan, config)

    if mode == "standard":
        rotated = _rotate_per_symbol(first, cpes.cpe_rad)
        return zf_equalize(rotated, chan), None

    if mode == "baseline_licpe":
        trace = interpolate_cpe_baseline(cpes, config)
    else:
        slopes = estimate_slope_cp(rx_time, config, estimator=slope_estimator)
        trace = interpolate_cpe_advanced(cpes, slopes, config)
    corrected = compensate(rx_time, trace)
    second = demodulate(corrected, config)
    return zf_equalize(second, chan), trace
