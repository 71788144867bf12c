"""Shared fixtures: the delay sweep used by trend tests is computed once.

The sweep covers all five numerologies, the six reference branch delays,
all three receiver modes and 30 seeds at infinite SNR — the working set
for every EVM-trend check.  Runs in a small process pool; results are
identical to serial execution.
"""

import os

import numpy as np
import pytest

from ofdmpn.experiments import SweepPlan, run_sweep

SWEEP_SEEDS = 30


@pytest.fixture(scope="session")
def delay_sweep_rows():
    plan = SweepPlan(seeds=tuple(range(SWEEP_SEEDS)))
    workers = min(4, os.cpu_count() or 1)
    return run_sweep(plan, workers=workers)


@pytest.fixture(scope="session")
def sweep_mean_evm(delay_sweep_rows):
    """(config_row, delay_s, mode) -> seed-averaged EVM percent."""
    acc = {}
    for r in delay_sweep_rows:
        acc.setdefault((r.config_row, r.delay_s, r.mode), []).append(r.evm_percent)
    return {k: float(np.mean(v)) for k, v in acc.items()}
