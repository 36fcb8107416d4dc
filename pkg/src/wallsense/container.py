"""Binary channel container.

Layout (little-endian throughout):

* magic ``b"BCHX"``
* u32 version (currently 1)
* u64 M, u64 N, u64 N_f
* N_f frequencies as float64, ascending
* M*N*N_f complex values as interleaved (real, imag) float32, stored with
  the frequency index outermost, then the receive index, then the
  transmit index

The single-precision payload matches typical instrument exports; loading
upcasts to complex128. ``quantize`` applies the same float32 round trip
in memory so a pipeline that keeps the synthesized matrix and one that
re-enters from the exported file see identical values.
"""

from __future__ import annotations

import struct

import numpy as np

from .channel import ChannelMatrix, FrequencyGrid
from .geometry import ArrayLayout

MAGIC = b"BCHX"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")


class ContainerFormatError(ValueError):
    """Malformed or truncated channel container."""


def quantize(data: np.ndarray) -> np.ndarray:
    """Round a complex array through the container's float32 payload."""
    return np.asarray(data, dtype=np.complex64).astype(np.complex128)


def write_channel_container(path, data: np.ndarray, freqs: np.ndarray) -> None:
    """Write raw channel data of shape (M, N, N_f) with its frequencies."""
    data = np.asarray(data, dtype=complex)
    freqs = np.asarray(freqs, dtype=float)
    if data.ndim != 3:
        raise ValueError("data must have shape (M, N, N_f)")
    m, n, nf = data.shape
    if freqs.shape != (nf,):
        raise ValueError("frequency count does not match data")
    payload = np.ascontiguousarray(data.transpose(2, 1, 0).astype("<c8"))
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, m, n, nf))
        f.write(freqs.astype("<f8").tobytes())
        f.write(payload.tobytes())


def read_channel_container(path):
    """Read a container; returns (data complex128 (M, N, N_f), freqs)."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ContainerFormatError("file shorter than the fixed header")
    magic, version, m, n, nf = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise ContainerFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ContainerFormatError(f"unsupported version {version}")
    off = _HEADER.size
    need = off + 8 * nf + 8 * m * n * nf
    if len(raw) != need:
        raise ContainerFormatError(
            f"payload truncated or oversized: {len(raw)} bytes, expected {need}")
    freqs = np.frombuffer(raw, dtype="<f8", count=nf, offset=off).copy()
    off += 8 * nf
    flat = np.frombuffer(raw, dtype="<c8", count=m * n * nf, offset=off)
    data = flat.reshape(nf, n, m).transpose(2, 1, 0).astype(np.complex128)
    return data, freqs


def save_channel(H: ChannelMatrix, path) -> None:
    """Write a channel matrix to a container file."""
    write_channel_container(path, H.data, H.grid.freqs)


def load_channel(path, tx: ArrayLayout, rx: ArrayLayout) -> ChannelMatrix:
    """Read a container and bind it to the array layouts it was measured on.

    The container itself stores only dimensions and frequencies, so the
    layouts must be supplied (typically from the scene description).
    """
    data, freqs = read_channel_container(path)
    m, n, _ = data.shape
    if len(tx) != m or len(rx) != n:
        raise ContainerFormatError(
            f"container is {m}x{n} but layouts have {len(tx)}x{len(rx)} elements")
    grid = FrequencyGrid(freqs)
    return ChannelMatrix(data, tx=tx, rx=rx, grid=grid)
