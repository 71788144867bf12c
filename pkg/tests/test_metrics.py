"""Unit tests for metrics.py: EVM, phase MSE, Welch PSD, BER.

Covers: hand-computed EVM values (unit error offset, small rotation),
rotation equivariance, phase-MSE arithmetic and edge exclusion, Welch
density calibration against a known sinusoid and white noise, the
variance/integral consistency of the density scaling, and the spectral
null structure of the differenced random-walk phase.
"""

import numpy as np
import pytest

from ofdmpn import (
    PhaseTrace,
    ber,
    evm_percent,
    gen_delayed_branch_phase,
    gen_wiener_phase,
    phase_mse,
    welch_psd,
)

FS = 245.76e6


# --- EVM ------------------------------------------------------------------


def test_evm_identical_inputs_is_zero():
    x = np.array([1 + 1j, -1 - 1j]) / np.sqrt(2)
    assert evm_percent(x, x) == 0.0


def test_evm_unit_error_on_unit_reference_is_10pct():
    ref = np.exp(1j * np.linspace(0, 2, 50))          # |ref| = 1 everywhere
    rx = ref + 0.1 * np.exp(1j * 0.3)                 # |error| = 0.1 everywhere
    assert evm_percent(rx, ref) == pytest.approx(10.0, abs=1e-9)


def test_evm_small_rotation_approximates_angle():
    # |e^{j theta} - 1| = 2 sin(theta/2) ~ theta for small theta
    theta = 0.05
    ref = np.full(100, 1 + 0j)
    rx = ref * np.exp(1j * theta)
    expect = 100.0 * 2 * np.sin(theta / 2)
    assert evm_percent(rx, ref) == pytest.approx(expect, rel=1e-9)
    assert evm_percent(rx, ref) == pytest.approx(100 * theta, rel=0.01)


def test_evm_common_rotation_equivariance():
    rng = np.random.default_rng(0)
    ref = rng.normal(size=64) + 1j * rng.normal(size=64)
    rx = ref + 0.05 * (rng.normal(size=64) + 1j * rng.normal(size=64))
    rot = np.exp(1j * 1.1)
    assert evm_percent(rx * rot, ref * rot) == pytest.approx(
        evm_percent(rx, ref), rel=1e-12)


def test_evm_input_validation():
    with pytest.raises(ValueError, match="empty"):
        evm_percent(np.array([]), np.array([]))
    with pytest.raises(ValueError, match="mismatch"):
        evm_percent(np.ones(3), np.ones(4))


# --- phase MSE ------------------------------------------------------------


def _trace(values, mask=None):
    return PhaseTrace(np.asarray(values, dtype=float), FS, edge_mask=mask)


def test_phase_mse_values_and_symmetry():
    a = _trace([0.0, 0.1, 0.2])
    b = _trace([0.1, 0.2, 0.3])
    assert phase_mse(a, a) == 0.0
    assert phase_mse(a, b) == pytest.approx(0.01, abs=1e-15)
    assert phase_mse(a, b) == phase_mse(b, a)


def test_phase_mse_edge_exclusion():
    mask = np.array([True, False, False, True])
    est = _trace([5.0, 0.1, 0.3, -5.0], mask=mask)
    tru = _trace([0.0, 0.1, 0.3, 0.0])
    assert phase_mse(est, tru, exclude_edges=True) == 0.0
    assert phase_mse(est, tru) == pytest.approx(50.0 / 4, rel=1e-12)
    # without a mask the flag is a no-op
    assert phase_mse(_trace([1.0, 2.0]), _trace([0.0, 0.0]),
                     exclude_edges=True) == pytest.approx(2.5)


def test_phase_mse_validation():
    with pytest.raises(ValueError, match="mismatch"):
        phase_mse(_trace([0.1]), _trace([0.1, 0.2]))
    all_edges = _trace([1.0, 2.0], mask=np.array([True, True]))
    with pytest.raises(ValueError, match="no samples"):
        phase_mse(all_edges, _trace([0.0, 0.0]), exclude_edges=True)


# --- Welch PSD ------------------------------------------------------------


def test_welch_sinusoid_peak_and_power():
    # A sine of amplitude A has variance A^2/2; integrating the density
    # recovers it and the peak lands on the sine frequency.
    amp = 0.1
    n = 1 << 16
    seg = 1 << 12
    f0 = 200 * FS / seg                       # on a segment bin
    t = np.arange(n) / FS
    trace = PhaseTrace(amp * np.sin(2 * np.pi * f0 * t), FS)
    freqs, psd = welch_psd(trace, seg)
    df = freqs[1] - freqs[0]
    total = np.sum(psd) * df
    assert total == pytest.approx(amp ** 2 / 2, rel=0.05)
    assert freqs[np.argmax(psd)] == pytest.approx(f0, abs=df / 2)


def test_welch_white_noise_level():
    # One-sided density of white noise with variance s^2 is 2*s^2/Fs.
    rng = np.random.default_rng(1)
    s = 0.3
    trace = PhaseTrace(rng.normal(0.0, s, 1 << 17), FS)
    freqs, psd = welch_psd(trace, 1 << 11)
    level = np.median(psd[(freqs > 0.05 * FS / 2) & (freqs < 0.9 * FS / 2)])
    assert level == pytest.approx(2 * s ** 2 / FS, rel=0.1)


def test_welch_integral_matches_variance():
    base = gen_wiener_phase(150.0, 1 << 18, FS, seed=2)
    trace = gen_delayed_branch_phase(base, 912e-9)
    freqs, psd = welch_psd(trace, 1 << 14)
    df = freqs[1] - freqs[0]
    total = np.sum(psd) * df
    var = np.var(trace.phase_rad)
    assert total == pytest.approx(var, rel=0.1)


def test_welch_differenced_walk_has_comb_nulls():
    # The branch-difference process phi[n] - phi[n-D] filters the walk with
    # |1 - e^{-j 2 pi f D/Fs}|^2, putting nulls at multiples of Fs/D.
    delay_s = 912e-9
    base = gen_wiener_phase(150.0, 1 << 20, FS, seed=3)
    trace = gen_delayed_branch_phase(base, delay_s)
    freqs, psd = welch_psd(trace, 1 << 16)
    f_null = 1.0 / delay_s
    null_zone = (freqs > 0.9 * f_null) & (freqs < 1.1 * f_null)
    anti_zone = (freqs > 0.3 * f_null) & (freqs < 0.7 * f_null)
    depth_db = 10 * np.log10(np.max(psd[anti_zone]) / np.min(psd[null_zone]))
    assert depth_db > 10, f"null only {depth_db:.1f} dB below antinode"


def test_welch_argument_validation():
    trace = PhaseTrace(np.zeros(100), FS)
    with pytest.raises(ValueError, match="segment_len"):
        welch_psd(trace, 101)
    with pytest.raises(ValueError, match="segment_len"):
        welch_psd(trace, 0)
    with pytest.raises(ValueError, match="overlap"):
        welch_psd(trace, 50, overlap_fraction=1.0)


# --- BER ------------------------------------------------------------------


def test_ber_examples():
    assert ber([0, 1, 1, 0], [0, 1, 1, 0]) == 0.0
    assert ber([0, 1, 1, 0], [0, 1, 0, 0]) == 0.25
    assert ber([1, 1], [0, 0]) == 1.0


def test_ber_validation():
    with pytest.raises(ValueError, match="mismatch"):
        ber([0, 1], [0])
    with pytest.raises(ValueError, match="empty"):
        ber([], [])
