"""ofdmpn — OFDM phase-noise simulation library.

Baseband OFDM transmit/receive chain, random-walk and delayed-branch
phase-noise channels, pilot-aided common-phase-error compensation with
linear interpolation (including a cyclic-prefix slope-assisted variant),
EVM/MSE/PSD/BER metrics, and a sweep CLI that writes CSV plus rendered
figures.
"""

from .ofdm import (
    OfdmConfig,
    ResourceGrid,
    TimeSignal,
    make_config,
    map_qpsk,
    demap_qpsk,
    build_grid,
    pilot_reference,
    modulate,
    demodulate,
)
from .channel import (
    PhaseTrace,
    gen_wiener_phase,
    gen_delayed_branch_phase,
    apply_channel,
)
from .compensation import (
    ChannelEstimate,
    CpeSeries,
    SlopeSeries,
    ideal_channel,
    estimate_channel_ls,
    estimate_cpe,
    estimate_slope_cp,
    interpolate_cpe_baseline,
    interpolate_cpe_advanced,
    compensate,
    zf_equalize,
    run_receiver,
)
from .metrics import RunMetrics, evm_percent, phase_mse, welch_psd, ber

__all__ = [
    "OfdmConfig",
    "ResourceGrid",
    "TimeSignal",
    "make_config",
    "map_qpsk",
    "demap_qpsk",
    "build_grid",
    "pilot_reference",
    "modulate",
    "demodulate",
    "PhaseTrace",
    "gen_wiener_phase",
    "gen_delayed_branch_phase",
    "apply_channel",
    "ChannelEstimate",
    "CpeSeries",
    "SlopeSeries",
    "ideal_channel",
    "estimate_channel_ls",
    "estimate_cpe",
    "estimate_slope_cp",
    "interpolate_cpe_baseline",
    "interpolate_cpe_advanced",
    "compensate",
    "zf_equalize",
    "run_receiver",
    "RunMetrics",
    "evm_percent",
    "phase_mse",
    "welch_psd",
    "ber",
]

__version__ = "0.1.0"
