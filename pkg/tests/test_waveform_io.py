"""Unit tests for waveform_io.py: binary waveform files and the metrics CSV.

Covers: IQ and phase round-trips and their storage precisions, metadata
persistence, byte-for-byte determinism, each distinct failure class (bad
magic, oversized header length, garbage JSON, missing keys, version bump,
short payload, unknown kind), and CSV shape/formatting stability.
"""

import struct

import numpy as np
import pytest

from ofdmpn import PhaseTrace, TimeSignal
from ofdmpn.metrics import RunMetrics
from ofdmpn.waveform_io import (
    MAGIC,
    MalformedHeaderError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    WaveformIOError,
    load_waveform,
    save_waveform,
    write_metrics_csv,
)

FS = 245.76e6


def _iq(n=257, seed=0):
    rng = np.random.default_rng(seed)
    return TimeSignal(rng.normal(size=n) + 1j * rng.normal(size=n), FS)


def _metrics_row(seed=0, mode="standard"):
    return RunMetrics(
        evm_percent=3.14159265, phase_mse_rad2=1.23456789e-3,
        phase_mse_excl_edges_rad2=1.1e-3, ber=0.0,
        per_symbol_cpe=np.zeros(2), config_row=2, delay_s=912e-9,
        beta_hz=150.0, snr_db=float("inf"), seed=seed, mode=mode,
        t_cp_s=1.2e-6, sample_rate_hz=FS, edge_sample_count=4391,
    )


# --- round trips ----------------------------------------------------------


def test_iq_roundtrip_at_float32_precision(tmp_path):
    sig = _iq()
    path = tmp_path / "sig.ofpn"
    save_waveform(path, sig, meta={"seed": 3})
    loaded, meta = load_waveform(path)
    assert isinstance(loaded, TimeSignal)
    assert loaded.sample_rate_hz == FS
    assert meta == {"seed": 3}
    scale = np.max(np.abs(sig.samples))
    assert np.max(np.abs(loaded.samples - sig.samples)) < 1e-6 * scale


def test_phase_roundtrip_is_float64_exact(tmp_path):
    trace = PhaseTrace(np.random.default_rng(1).normal(size=500) * 1e-3, FS)
    path = tmp_path / "trace.ofpn"
    save_waveform(path, trace)
    loaded, meta = load_waveform(path)
    assert isinstance(loaded, PhaseTrace)
    assert np.array_equal(loaded.phase_rad, trace.phase_rad)
    assert meta == {}


def test_save_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.ofpn", tmp_path / "b.ofpn"
    save_waveform(a, _iq(), meta={"z": 1, "a": 2})
    save_waveform(b, _iq(), meta={"a": 2, "z": 1})   # key order irrelevant
    assert a.read_bytes() == b.read_bytes()


def test_unserializable_object_raises(tmp_path):
    with pytest.raises(TypeError, match="serialize"):
        save_waveform(tmp_path / "x.ofpn", np.zeros(4))


# --- failure classes ------------------------------------------------------


def _valid_bytes(tmp_path):
    path = tmp_path / "ok.ofpn"
    save_waveform(path, _iq(16))
    return path, bytearray(path.read_bytes())


def test_bad_magic_rejected(tmp_path):
    path, raw = _valid_bytes(tmp_path)
    raw[:4] = b"WAVE"
    path.write_bytes(raw)
    with pytest.raises(MalformedHeaderError, match="magic"):
        load_waveform(path)


def test_header_length_beyond_file_rejected(tmp_path):
    path, raw = _valid_bytes(tmp_path)
    raw[4:8] = struct.pack("<I", len(raw))
    path.write_bytes(raw)
    with pytest.raises(MalformedHeaderError, match="header length"):
        load_waveform(path)


def test_garbage_json_rejected(tmp_path):
    path, raw = _valid_bytes(tmp_path)
    raw[8] = ord("!")
    path.write_bytes(raw)
    with pytest.raises(MalformedHeaderError, match="unparseable"):
        load_waveform(path)


def test_missing_header_key_rejected(tmp_path):
    path = tmp_path / "k.ofpn"
    blob = b'{"kind":"iq","n_samples":0,"version":1}'   # no sample_rate_hz
    path.write_bytes(MAGIC + struct.pack("<I", len(blob)) + blob)
    with pytest.raises(MalformedHeaderError, match="sample_rate_hz"):
        load_waveform(path)


def test_future_version_rejected(tmp_path):
    path, raw = _valid_bytes(tmp_path)
    i = raw.index(b'"version":1') + len(b'"version":')
    raw[i:i + 1] = b"9"
    path.write_bytes(raw)
    with pytest.raises(UnsupportedVersionError, match="version 9"):
        load_waveform(path)


def test_truncated_payload_rejected(tmp_path):
    path, raw = _valid_bytes(tmp_path)
    path.write_bytes(raw[:-4])
    with pytest.raises(TruncatedPayloadError, match="payload"):
        load_waveform(path)


def test_unknown_kind_rejected(tmp_path):
    path = tmp_path / "u.ofpn"
    blob = b'{"kind":"psd","n_samples":0,"sample_rate_hz":1.0,"version":1}'
    path.write_bytes(MAGIC + struct.pack("<I", len(blob)) + blob)
    with pytest.raises(MalformedHeaderError, match="unknown kind"):
        load_waveform(path)


def test_error_hierarchy():
    for cls in (MalformedHeaderError, TruncatedPayloadError,
                UnsupportedVersionError):
        assert issubclass(cls, WaveformIOError)


# --- metrics CSV ----------------------------------------------------------


def test_csv_header_only_when_empty(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics_csv([], path)
    text = path.read_text()
    assert text == ",".join(RunMetrics.CSV_FIELDS) + "\n"


def test_csv_rows_and_column_order(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics_csv([_metrics_row(0), _metrics_row(1, "advanced_licpe")], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].split(",") == list(RunMetrics.CSV_FIELDS)
    first = dict(zip(RunMetrics.CSV_FIELDS, lines[1].split(",")))
    assert first["config_row"] == "2"
    assert first["mode"] == "standard"
    assert first["snr_db"] == "inf"
    # floats are capped at nine significant digits
    assert first["evm_percent"] == "3.14159265"
    assert first["phase_mse_rad2"] == "0.00123456789"
    assert first["delay_s"] == "9.12e-07"


def test_csv_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    rows = [_metrics_row(s) for s in range(3)]
    write_metrics_csv(rows, a)
    write_metrics_csv(rows, b)
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
