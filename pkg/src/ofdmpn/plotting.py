"""plotting.py — render experiment results to PNG next to their CSV output.

Uses the Agg backend unconditionally and strips the Software metadata tag
so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .compensation import MODES

_SAVE_KWARGS = dict(dpi=120, metadata={"Software": None})

_ROW_SPACING_KHZ = {1: 30.0, 2: 60.0, 3: 120.0, 4: 240.0, 5: 480.0}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_sweep(rows, path) -> None:
    """Seed-averaged EVM vs subcarrier spacing, one panel per receiver mode,
    one curve per branch delay."""
    modes = sorted({r.mode for r in rows}, key=MODES.index)
    delays = sorted({r.delay_s for r in rows})
    fig, axes = plt.subplots(1, len(modes), figsize=(4.2 * len(modes), 3.4),
                             sharey=True, squeeze=False)
    for ax, mode in zip(axes[0], modes):
        for delay in delays:
            pts = {}
            for r in rows:
                if r.mode == mode and r.delay_s == delay:
                    pts.setdefault(r.config_row, []).append(r.evm_percent)
            xs = sorted(pts)
            spacing_khz = [_ROW_SPACING_KHZ[r] for r in xs]
            ys = [float(np.mean(pts[r])) for r in xs]
            ax.plot(spacing_khz, ys, marker=".",
                    label=f"{delay * 1e9:.0f} ns")
        ax.set_xscale("log")
        ax.set_xlabel("subcarrier spacing [kHz]")
        ax.set_title(mode)
        ax.grid(True, which="both", alpha=0.3)
    axes[0][0].set_ylabel("EVM [%]")
    axes[0][-1].legend(title="branch delay", fontsize=8)
    _finish(fig, path)


def render_psd(freqs, psd, path, title="phase-noise PSD") -> None:
    """One-sided PSD in dB (rad^2/Hz) over MHz, log frequency axis."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    pos = freqs > 0
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(psd[pos])
    ax.semilogx(freqs[pos] / 1e6, db, lw=0.9)
    ax.set_xlabel("frequency [MHz]")
    ax.set_ylabel("PSD [dB rad$^2$/Hz]")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def render_figure1(data, path) -> None:
    """True phase vs baseline/advanced estimates with CPE anchor markers."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.plot(data["sample_index"], data["true_phase"], "k-", lw=1.0,
            label="true phase")
    ax.plot(data["sample_index"], data["baseline_est"], "-", lw=0.9,
            color="tab:blue",
            label=f"baseline interp (MSE {data['mse_baseline']:.4f})")
    ax.plot(data["sample_index"], data["advanced_est"], "-", lw=0.9,
            color="tab:green",
            label=f"per-symbol line (MSE {data['mse_advanced']:.4f})")
    ax.plot(data["anchor_samples"], data["anchor_cpe"], "o", ms=3,
            color="tab:orange", label="CPE anchors")
    ax.set_xlabel("sample index")
    ax.set_ylabel("phase [rad]")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def render_constellation(points, path, title="equalized data cells") -> None:
    fig, ax = plt.subplots(figsize=(3.8, 3.8))
    pts = np.asarray(points).ravel()
    ax.plot(pts.real, pts.imag, ".", ms=2, alpha=0.5)
    ax.set_xlabel("I")
    ax.set_ylabel("Q")
    ax.set_title(title)
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    _finish(fig, path)
