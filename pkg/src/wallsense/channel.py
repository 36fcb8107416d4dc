"""Geometric channel synthesis: free-space transmission coefficients per
image source, received phasors, path gain, and channel-matrix assembly.

Every coefficient follows the Friis equation formulated for power wave
amplitudes: amplitude lambda / (4 pi d) and phase -2 pi d / lambda, with
lambda recomputed per frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import ArrayLayout, MirrorSource, as_point, mirror_sources

C0 = 299_792_458.0
NEG_INF_DB = float("-inf")


class DegenerateGeometryError(ValueError):
    """A propagation distance collapsed to zero."""


def db10(x) -> float:
    """Power ratio in dB; exactly 0 maps to the -inf sentinel."""
    x = float(x)
    if x < 0:
        raise ValueError("power ratio must be non-negative")
    if x == 0.0:
        return NEG_INF_DB
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing evaluation frequencies in Hz.

    ``bands`` records the (f_lo, f_hi, count) descriptors the grid was
    assembled from; a restricted grid keeps the descriptors of the bands
    that were applied to it.
    """

    freqs: np.ndarray
    bands: tuple = ()

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float)
        if f.ndim != 1 or f.size < 1:
            raise ValueError("freqs must be a non-empty 1-d array")
        if not np.all(f > 0):
            raise ValueError("frequencies must be positive")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "bands", tuple(tuple(b) for b in self.bands))

    @classmethod
    def from_bands(cls, bands: Sequence[tuple]) -> "FrequencyGrid":
        """Concatenate linearly spaced bands given as (f_lo, f_hi, count)."""
        parts = []
        for lo, hi, count in bands:
            if count < 1:
                raise ValueError("band point count must be at least 1")
            parts.append(np.linspace(lo, hi, int(count)))
        return cls(np.concatenate(parts), bands=tuple(tuple(b) for b in bands))

    @classmethod
    def linear(cls, f_lo: float, f_hi: float, count: int) -> "FrequencyGrid":
        return cls.from_bands([(f_lo, f_hi, count)])

    def __len__(self) -> int:
        return int(self.freqs.size)

    def nearest_index(self, f: float) -> int:
        return int(np.argmin(np.abs(self.freqs - f)))


@dataclass(frozen=True)
class AntennaModel:
    """Pluggable power gain pattern g(elevation, azimuth) >= 0.

    Angles are evaluated in the world frame (elevation from the horizontal
    plane, azimuth from the x-axis); element orientation is not modeled.
    """

    gain: Callable[[np.ndarray, np.ndarray], np.ndarray]
    is_isotropic: bool = False

    @staticmethod
    def isotropic() -> "AntennaModel":
        return AntennaModel(lambda el, az: np.ones(np.broadcast(el, az).shape),
                            is_isotropic=True)


ISOTROPIC = AntennaModel.isotropic()


def direction_angles(vec: np.ndarray):
    """(elevation, azimuth) of direction vectors with shape (..., 3)."""
    x, y, z = vec[..., 0], vec[..., 1], vec[..., 2]
    return np.arctan2(z, np.hypot(x, y)), np.arctan2(y, x)


@dataclass(frozen=True)
class ChannelMatrix:
    """Forward transmission coefficients over (tx element, rx element, freq)."""

    data: np.ndarray
    tx: ArrayLayout
    rx: ArrayLayout
    grid: FrequencyGrid

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        expected = (len(self.tx), len(self.rx), len(self.grid))
        if d.shape != expected:
            raise ValueError(f"data shape {d.shape} does not match metadata {expected}")
        if not np.all(np.isfinite(d)):
            raise ValueError("channel entries must be finite")
        object.__setattr__(self, "data", d)

    @property
    def shape(self):
        return self.data.shape


def _transmission(elements: np.ndarray, points: np.ndarray, freqs: np.ndarray,
                  gamma: complex, tx_model: AntennaModel,
                  rx_model: AntennaModel) -> np.ndarray:
    """Per-path Friis coefficients, shape (n_elements, n_points, n_freqs).

    The same kernel backs single-vector and full-matrix synthesis so that
    both produce identical floating-point values.
    """
    diff = points[None, :, :] - elements[:, None, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.any(dist == 0.0):
        raise DegenerateGeometryError(
            "evaluation point coincides with an array element")
    lam = C0 / np.asarray(freqs, dtype=float)
    d3 = dist[:, :, None]
    entries = (lam / (4.0 * np.pi * d3)) * np.exp(-2j * np.pi * d3 / lam)
    if not (tx_model.is_isotropic and rx_model.is_isotropic):
        el, az = direction_angles(diff)
        g = tx_model.gain(el, az) * rx_model.gain(-el, np.arctan2(-diff[..., 1],
                                                                  -diff[..., 0]))
        if np.any(g < 0):
            raise ValueError("antenna gain must be non-negative")
        entries = np.sqrt(g)[:, :, None] * entries
    if gamma != 1.0 + 0.0j:
        entries = gamma * entries
    return entries


def smc_channel_vector(src: MirrorSource, ue, f: float,
                       tx_model: AntennaModel = ISOTROPIC,
                       rx_model: AntennaModel = ISOTROPIC) -> np.ndarray:
    """Channel vector of a single image source at one frequency.

    Entry m is gamma * sqrt(Gt*Gr) * lambda/(4 pi d_m) * exp(-j 2 pi d_m/lambda)
    with d_m the distance from the m-th (mirrored) element to ``ue``.
    """
    p = as_point(ue)
    ent = _transmission(src.layout.elements, p[None, :], np.array([float(f)]),
                        src.reflection_coeff, tx_model, rx_model)
    return ent[:, 0, 0]


def channel_vector(sources: Sequence[MirrorSource], ue, f: float,
                   tx_model: AntennaModel = ISOTROPIC,
                   rx_model: AntennaModel = ISOTROPIC) -> np.ndarray:
    """Superposition of the per-source channel vectors.

    The sum runs in ascending k for bit-reproducible results.
    """
    if len(sources) < 1:
        raise ValueError("at least one source is required")
    acc = None
    for src in sources:
        h = smc_channel_vector(src, ue, f, tx_model, rx_model)
        acc = h if acc is None else acc + h
    return acc


def channel_matrix(tx: ArrayLayout, rx: ArrayLayout, walls,
                   grid: FrequencyGrid,
                   tx_model: AntennaModel = ISOTROPIC,
                   rx_model: AntennaModel = ISOTROPIC) -> ChannelMatrix:
    """Synthesize the full channel over (tx element, rx element, frequency).

    Each rx element plays the role of the receive point; mirror sources are
    derived from ``walls`` once and accumulated in ascending k.
    """
    sources = mirror_sources(tx, walls)
    acc = None
    for src in sources:
        ent = _transmission(src.layout.elements, rx.elements, grid.freqs,
                            src.reflection_coeff, tx_model, rx_model)
        acc = ent if acc is None else acc + ent
    return ChannelMatrix(acc, tx=tx, rx=rx, grid=grid)


def received_phasor(h: np.ndarray, w: np.ndarray, pt: float = 1.0) -> complex:
    """Complex baseband amplitude h^T w sqrt(Pt).

    The inner product is the plain (non-conjugated) one; maximum-ratio
    weights therefore carry the conjugation themselves.
    """
    h = np.asarray(h, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if h.shape != w.shape or h.ndim != 1:
        raise ValueError("channel and weight vectors must be 1-d and equal length")
    nw = np.linalg.norm(w)
    if abs(nw - 1.0) > 1e-9:
        raise ValueError(f"weights must be unit norm (got {nw})")
    if not pt >= 0:
        raise ValueError("transmit power must be non-negative")
    return complex(np.dot(h, w) * np.sqrt(pt))


def path_gain(alpha: complex, pt: float) -> float:
    """Received-to-transmitted power ratio |alpha|^2 / Pt."""
    if not pt > 0:
        raise ValueError("transmit power must be positive")
    return abs(alpha) ** 2 / pt


def path_gain_db(alpha: complex, pt: float) -> float:
    """Path gain in dB; zero amplitude maps to the -inf sentinel."""
    return db10(path_gain(alpha, pt))


def add_awgn(H: ChannelMatrix, snr_db: float, seed: int) -> ChannelMatrix:
    """Add circularly symmetric complex Gaussian noise at a fixed SNR.

    The per-entry noise variance is mean(|H|^2) / 10^(snr_db/10); the draw
    is deterministic for a given seed.
    """
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    sigma2 = float(np.mean(np.abs(H.data) ** 2)) * 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    scale = np.sqrt(sigma2 / 2.0)
    noise = scale * (rng.standard_normal(H.data.shape)
                     + 1j * rng.standard_normal(H.data.shape))
    return ChannelMatrix(H.data + noise, tx=H.tx, rx=H.rx, grid=H.grid)
