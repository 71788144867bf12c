"""ofdm.py — numerology table, resource grids, QPSK mapping, OFDM (de)modulation.

The five predefined configurations share one sample rate (fft_size times
subcarrier spacing, 245.76 MHz for every row) and differ in subcarrier
spacing, FFT size and cyclic-prefix duration.  Active subcarriers form a
contiguous band centred on DC (DC itself is always null), pilots sit on
every `pilot_stride`-th active subcarrier starting from the lowest one.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

# Unit-energy Gray-mapped QPSK: index 2*b0 + b1 -> ((-1)^b0 + 1j*(-1)^b1)/sqrt(2)
QPSK_POINTS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=complex) / np.sqrt(2.0)

# row -> (subcarrier spacing [Hz], FFT size, CP duration [s])
_ROW_PARAMS = {
    1: (30e3, 8192, 2.4e-6),
    2: (60e3, 4096, 1.2e-6),
    3: (120e3, 2048, 0.6e-6),
    4: (240e3, 1024, 0.3e-6),
    5: (480e3, 512, 0.15e-6),
}


@dataclass(frozen=True)
class OfdmConfig:
    """One OFDM numerology plus frame geometry.

    Derived index arrays (`active_bins`, `pilot_bins`, `data_bins`) are FFT-bin
    indices ordered by signed subcarrier index ascending, so "first pilot"
    means the pilot at the most negative active frequency.
    """

    subcarrier_spacing_hz: float
    fft_size: int
    cp_len_samples: int
    active_fraction: float = 0.8
    pilot_stride: int = 12
    modulation: str = "qpsk"
    n_symbols: int = 20

    def __post_init__(self):
        n = self.fft_size
        if n <= 0 or (n & (n - 1)) != 0:
            raise ValueError(f"fft_size must be a positive power of two, got {n}")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier_spacing_hz must be positive")
        if not 0 <= self.cp_len_samples < n:
            raise ValueError(
                f"cp_len_samples must be in [0, fft_size), got {self.cp_len_samples}"
            )
        if not 0.0 < self.active_fraction <= 1.0:
            raise ValueError("active_fraction must be in (0, 1]")
        if self.pilot_stride < 1:
            raise ValueError("pilot_stride must be >= 1")
        if self.modulation != "qpsk":
            raise ValueError(f"unsupported modulation {self.modulation!r}")
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")
        if self.n_pilots < 2:
            raise ValueError("configuration yields fewer than 2 pilot subcarriers")

    # --- derived geometry -------------------------------------------------

    @property
    def sample_rate_hz(self) -> float:
        return self.fft_size * self.subcarrier_spacing_hz

    @property
    def total_symbol_len(self) -> int:
        """Samples per OFDM symbol including the cyclic prefix."""
        return self.fft_size + self.cp_len_samples

    @property
    def cp_duration_s(self) -> float:
        """Realized CP duration after rounding to whole samples."""
        return self.cp_len_samples / self.sample_rate_hz

    @property
    def frame_len(self) -> int:
        return self.n_symbols * self.total_symbol_len

    @property
    def active_subcarriers(self) -> np.ndarray:
        """Signed subcarrier indices of usable (non-DC) active cells, ascending."""
        count = round(self.active_fraction * self.fft_size)
        lo = -(count // 2)
        hi = count - count // 2
        signed = np.arange(lo, hi)
        return signed[signed != 0]

    @property
    def active_bins(self) -> np.ndarray:
        return np.mod(self.active_subcarriers, self.fft_size)

    @property
    def _pilot_positions(self) -> np.ndarray:
        """Positions of pilots within the active-subcarrier ordering."""
        return np.arange(0, len(self.active_subcarriers), self.pilot_stride)

    @property
    def pilot_bins(self) -> np.ndarray:
        return self.active_bins[self._pilot_positions]

    @property
    def data_bins(self) -> np.ndarray:
        mask = np.ones(len(self.active_subcarriers), dtype=bool)
        mask[self._pilot_positions] = False
        return self.active_bins[mask]

    @property
    def n_active(self) -> int:
        return len(self.active_subcarriers)

    @property
    def n_pilots(self) -> int:
        return len(self._pilot_positions)

    @property
    def n_data(self) -> int:
        return self.n_active - self.n_pilots

    @property
    def bits_per_frame(self) -> int:
        return 2 * self.n_data * self.n_symbols


def make_config(table_row: int, *, active_fraction: float | None = None,
                n_symbols: int = 20) -> OfdmConfig:
    """Build the OfdmConfig for one of the five predefined numerologies.

    `active_fraction` overrides the default 0.8 (e.g. 1.0 for a fully
    occupied grid); `n_symbols` sets the frame length.
    """
    if table_row not in _ROW_PARAMS:
        raise ValueError(f"table_row must be in 1..5, got {table_row}")
    df, n, t_cp = _ROW_PARAMS[table_row]
    cp = round(t_cp * n * df)
    return OfdmConfig(
        subcarrier_spacing_hz=df,
        fft_size=n,
        cp_len_samples=cp,
        active_fraction=0.8 if active_fraction is None else active_fraction,
        n_symbols=n_symbols,
    )


@dataclass
class ResourceGrid:
    """Frequency-domain frame: `symbols` is (n_symbols, fft_size) complex.

    The index arrays partition the FFT bins into pilot, data and guard cells
    (guard = everything else, always zero).
    """

    symbols: np.ndarray
    pilot_bins: np.ndarray
    data_bins: np.ndarray

    @property
    def n_symbols(self) -> int:
        return self.symbols.shape[0]

    @property
    def guard_bins(self) -> np.ndarray:
        n = self.symbols.shape[1]
        used = np.concatenate([self.pilot_bins, self.data_bins])
        mask = np.ones(n, dtype=bool)
        mask[used] = False
        return np.nonzero(mask)[0]


@dataclass
class TimeSignal:
    """Complex baseband sample stream."""

    samples: np.ndarray
    sample_rate_hz: float

    def __len__(self):
        return len(self.samples)


def map_qpsk(bits) -> np.ndarray:
    """Map a 0/1 bit array (even length) to Gray-coded unit-energy QPSK."""
    bits = np.asarray(bits)
    if bits.size % 2:
        raise ValueError(f"bit count must be even, got {bits.size}")
    pairs = bits.reshape(-1, 2)
    return QPSK_POINTS[2 * pairs[:, 0] + pairs[:, 1]]


def demap_qpsk(symbols) -> np.ndarray:
    """Hard-decision inverse of map_qpsk."""
    symbols = np.asarray(symbols)
    bits = np.empty((symbols.size, 2), dtype=np.uint8)
    bits[:, 0] = np.real(symbols).ravel() < 0
    bits[:, 1] = np.imag(symbols).ravel() < 0
    return bits.ravel()


def pilot_reference(config: OfdmConfig, pilot_seed: int) -> np.ndarray:
    """Deterministic pilot cell values, shape (n_symbols, n_pilots).

    The receiver regenerates the transmitted pilots from the same seed.
    """
    rng = np.random.default_rng(pilot_seed)
    idx = rng.integers(0, 4, size=(config.n_symbols, config.n_pilots))
    return QPSK_POINTS[idx]


def build_grid(config: OfdmConfig, data, pilot_seed: int) -> ResourceGrid:
    """Assemble a frame grid from data symbols plus seeded pseudo-random pilots.

    `data` must hold n_symbols * n_data complex symbols; they fill the data
    cells in ascending (symbol, subcarrier) order.
    """
    data = np.asarray(data, dtype=complex)
    expected = config.n_symbols * config.n_data
    if data.size != expected:
        raise ValueError(
            f"data length {data.size} != n_symbols*n_data = {expected}"
        )
    grid = np.zeros((config.n_symbols, config.fft_size), dtype=complex)
    grid[:, config.pilot_bins] = pilot_reference(config, pilot_seed)
    grid[:, config.data_bins] = data.reshape(config.n_symbols, config.n_data)
    return ResourceGrid(grid, config.pilot_bins.copy(), config.data_bins.copy())


def modulate(grid: ResourceGrid, config: OfdmConfig) -> TimeSignal:
    """Unitary IDFT per symbol, prepend the cyclic prefix, concatenate."""
    if grid.symbols.shape != (config.n_symbols, config.fft_size):
        raise ValueError(
            f"grid shape {grid.symbols.shape} does not match config "
            f"({config.n_symbols}, {config.fft_size})"
        )
    td = np.fft.ifft(grid.symbols, axis=1, norm="ortho")
    if config.cp_len_samples:
        td = np.hstack([td[:, -config.cp_len_samples:], td])
    return TimeSignal(td.ravel(), config.sample_rate_hz)


def demodulate(signal: TimeSignal, config: OfdmConfig) -> ResourceGrid:
    """Drop each symbol's cyclic prefix and apply the unitary DFT."""
    nt = config.total_symbol_len
    samples = np.asarray(signal.samples)
    if len(samples) % nt:
        raise ValueError(
            f"signal length {len(samples)} is not a multiple of the "
            f"symbol length {nt}"
        )
    sym = samples.reshape(-1, nt)[:, config.cp_len_samples:]
    grid = np.fft.fft(sym, axis=1, norm="ortho")
    return ResourceGrid(grid, config.pilot_bins.copy(), config.data_bins.copy())
