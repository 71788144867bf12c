"""channel.py — phase-noise generation and channel application.

Two phase processes are provided: a pure random-walk (Wiener) phase with
increment variance 2*pi*beta/Fs set by the oscillator's two-sided 3-dB
linewidth beta, and the delayed-branch process psi[n] = phi[n] - phi[n-D]
obtained when a signal beats against a delayed copy of its own phase
source.  `apply_channel` rotates a time signal by a phase trace and
optionally adds complex white Gaussian noise at a prescribed SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import TimeSignal

MAGNITUDE_EPS = 1e-12


@dataclass
class PhaseTrace:
    """Per-sample phase values in radians.

    `edge_mask`, when present, flags samples produced by a constant-value
    edge fallback of an interpolator (True = edge sample); generators leave
    it None.
    """

    phase_rad: np.ndarray
    sample_rate_hz: float
    edge_mask: np.ndarray | None = None

    def __len__(self):
        return len(self.phase_rad)


def gen_wiener_phase(beta_hz: float, n_samples: int, sample_rate_hz: float,
                     seed) -> PhaseTrace:
    """Random-walk phase: phi[0] = 0, i.i.d. Gaussian increments.

    Increment variance is 2*pi*beta_hz / sample_rate_hz.  `seed` may be an
    int, a SeedSequence, or an existing Generator.
    """
    if beta_hz < 0:
        raise ValueError(f"beta_hz must be non-negative, got {beta_hz}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(2.0 * np.pi * beta_hz / sample_rate_hz)
    steps = rng.normal(0.0, sigma, n_samples - 1)
    phase = np.empty(n_samples)
    phase[0] = 0.0
    np.cumsum(steps, out=phase[1:])
    return PhaseTrace(phase, sample_rate_hz)


def gen_delayed_branch_phase(base: PhaseTrace, delay_s: float) -> PhaseTrace:
    """Difference of a phase trace against its own delayed copy.

    psi[n] = phi[n] - phi[n-D] with D = round(delay_s * Fs); the first D
    samples use phi[0] as the delayed value.  delay_s = 0 gives an all-zero
    trace.
    """
    if delay_s < 0:
        raise ValueError("delay_s must be non-negative")
    phi = np.asarray(base.phase_rad)
    d = round(delay_s * base.sample_rate_hz)
    if d >= len(phi):
        raise ValueError(
            f"delay of {d} samples is not shorter than the trace ({len(phi)})"
        )
    psi = np.empty_like(phi)
    psi[:d] = phi[:d] - phi[0]
    psi[d:] = phi[d:] - phi[:len(phi) - d]
    return PhaseTrace(psi, base.sample_rate_hz)


def apply_channel(signal: TimeSignal, phase: PhaseTrace, snr_db: float,
                  seed=0) -> TimeSignal:
    """Rotate by the phase trace, then add receiver-referred AWGN.

    Noise power is set from the measured input signal power so that
    10*log10(P_signal / P_noise) = snr_db; snr_db = +inf adds nothing and
    draws nothing from the generator.
    """
    x = np.asarray(signal.samples)
    if len(x) != len(phase.phase_rad):
        raise ValueError(
            f"signal length {len(x)} != phase length {len(phase.phase_rad)}"
        )
    out = x * np.exp(1j * phase.phase_rad)
    if np.isfinite(snr_db):
        rng = np.random.default_rng(seed)
        p_sig = np.mean(np.abs(x) ** 2)
        p_noise = p_sig / 10.0 ** (snr_db / 10.0)
        scale = np.sqrt(p_noise / 2.0)
        out = out + (rng.normal(0.0, scale, len(x))
                     + 1j * rng.normal(0.0, scale, len(x)))
    return TimeSignal(out, signal.sample_rate_hz)
