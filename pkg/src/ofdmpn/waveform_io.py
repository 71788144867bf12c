"""waveform_io.py — deterministic binary waveform files and metrics CSV.

File layout: 4-byte magic, little-endian uint32 header length, UTF-8 JSON
header with sorted keys, raw payload.  Complex signals are stored as
interleaved little-endian float32 I/Q pairs, phase traces as float64
(phase MSE at the 1e-3 rad^2 scale needs the headroom).  Identical inputs
always produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import struct

import numpy as np

from .channel import PhaseTrace
from .metrics import RunMetrics
from .ofdm import TimeSignal

MAGIC = b"OFPN"
FORMAT_VERSION = 1


class WaveformIOError(Exception):
    """Base class for waveform file errors."""


class MalformedHeaderError(WaveformIOError):
    """Magic, length prefix or JSON header is invalid."""


class TruncatedPayloadError(WaveformIOError):
    """Payload is shorter than the header declares."""


class UnsupportedVersionError(WaveformIOError):
    """File was written by an unknown format version."""


def save_waveform(path, obj, meta: dict | None = None) -> None:
    """Write a TimeSignal ("iq", float32 pairs) or PhaseTrace ("phase", float64)."""
    if isinstance(obj, TimeSignal):
        kind = "iq"
        samples = np.asarray(obj.samples, dtype=complex)
        payload = np.empty(2 * samples.size, dtype="<f4")
        payload[0::2] = samples.real
        payload[1::2] = samples.imag
        n = samples.size
    elif isinstance(obj, PhaseTrace):
        kind = "phase"
        payload = np.asarray(obj.phase_rad, dtype="<f8")
        n = payload.size
    else:
        raise TypeError(f"cannot serialize object of type {type(obj).__name__}")
    header = {
        "version": FORMAT_VERSION,
        "kind": kind,
        "sample_rate_hz": float(obj.sample_rate_hz),
        "n_samples": int(n),
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        f.write(payload.tobytes())


def load_waveform(path):
    """Read a waveform file; returns (TimeSignal or PhaseTrace, meta dict)."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise MalformedHeaderError(f"{path}: bad magic")
    (hlen,) = struct.unpack("<I", raw[4:8])
    if len(raw) < 8 + hlen:
        raise MalformedHeaderError(f"{path}: header length exceeds file size")
    try:
        header = json.loads(raw[8:8 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedHeaderError(f"{path}: unparseable header") from exc
    for key in ("version", "kind", "sample_rate_hz", "n_samples"):
        if key not in header:
            raise MalformedHeaderError(f"{path}: header missing {key!r}")
    if header["version"] != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"{path}: version {header['version']} (expected {FORMAT_VERSION})"
        )
    n = int(header["n_samples"])
    body = raw[8 + hlen:]
    meta = header.get("meta", {})
    if header["kind"] == "iq":
        if len(body) < 8 * n:
            raise TruncatedPayloadError(
                f"{path}: expected {8 * n} payload bytes, found {len(body)}"
            )
        flat = np.frombuffer(body[:8 * n], dtype="<f4")
        samples = flat[0::2].astype(float) + 1j * flat[1::2].astype(float)
        return TimeSignal(samples, header["sample_rate_hz"]), meta
    if header["kind"] == "phase":
        if len(body) < 8 * n:
            raise TruncatedPayloadError(
                f"{path}: expected {8 * n} payload bytes, found {len(body)}"
            )
        phase = np.frombuffer(body[:8 * n], dtype="<f8").copy()
        return PhaseTrace(phase, header["sample_rate_hz"]), meta
    raise MalformedHeaderError(f"{path}: unknown kind {header['kind']!r}")


def _fmt(value) -> str:
    """Stable CSV cell formatting: floats at 9 significant digits."""
    if isinstance(value, float) or isinstance(value, np.floating):
        return f"{value:.9g}"
    return str(value)


def write_metrics_csv(rows, path) -> None:
    """One CSV row per RunMetrics, fixed column order, '\\n' line endings."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RunMetrics.CSV_FIELDS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, name))
                             for name in RunMetrics.CSV_FIELDS])
