"""Bistatic MIMO radar reflectivity mapping.

Each pixel of the map focuses both arrays at the pixel position with
position-based maximum-ratio weights (spherical wavefronts, line-of-sight
only, isotropic gains) and coherently sums the weighted channel over the
frequency grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import C0, ChannelMatrix, DegenerateGeometryError, FrequencyGrid
from .geometry import ArrayLayout, MirrorSource, as_point
from . import channel as _channel

_EPS = 1e-12


@dataclass(frozen=True)
class ImagingWindow:
    """Horizontal pixel grid: pixel (r, c) sits at origin + c*step*u + r*step*v.

    ``u_axis`` spans the columns and ``v_axis`` the rows; both are
    horizontal unit vectors. ``z_plane`` duplicates the origin height for
    convenience and must agree with it.
    """

    origin: np.ndarray
    nu: int
    nv: int
    step: float
    u_axis: np.ndarray = (1.0, 0.0, 0.0)
    v_axis: np.ndarray = (0.0, 1.0, 0.0)
    z_plane: float | None = None

    def __post_init__(self):
        o = as_point(self.origin)
        u = as_point(self.u_axis)
        v = as_point(self.v_axis)
        if self.nu < 1 or self.nv < 1:
            raise ValueError("pixel counts must be at least 1")
        if not self.step > 0:
            raise ValueError("step must be positive")
        for name, ax in (("u_axis", u), ("v_axis", v)):
            if abs(np.linalg.norm(ax) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be a unit vector")
            if abs(ax[2]) > 1e-9:
                raise ValueError(f"{name} must be horizontal")
        if abs(np.dot(u, v)) > 1e-9:
            raise ValueError("u_axis and v_axis must be orthogonal")
        z = o[2] if self.z_plane is None else float(self.z_plane)
        if abs(z - o[2]) > _EPS:
            raise ValueError("z_plane must match the origin height")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "u_axis", u)
        object.__setattr__(self, "v_axis", v)
        object.__setattr__(self, "z_plane", z)

    @property
    def shape(self):
        """(rows, cols) of images over this window."""
        return (self.nv, self.nu)

    def pixel_to_world(self, r, c) -> np.ndarray:
        """World coordinates of fractional pixel indices; broadcasts."""
        r = np.asarray(r, dtype=float)
        c = np.asarray(c, dtype=float)
        return (self.origin[None, :]
                + (c * self.step).reshape(-1, 1) * self.u_axis[None, :]
                + (r * self.step).reshape(-1, 1) * self.v_axis[None, :]
                ).reshape(np.broadcast(r, c).shape + (3,))

    def world_to_pixel(self, p):
        """Fractional (r, c) of a world point projected onto the window."""
        d = as_point(p) - self.origin
        return (float(np.dot(d, self.v_axis) / self.step),
                float(np.dot(d, self.u_axis) / self.step))

    def world_points(self) -> np.ndarray:
        """All pixel centers, shape (nv*nu, 3), row-major order."""
        rr, cc = np.meshgrid(np.arange(self.nv), np.arange(self.nu), indexing="ij")
        return self.pixel_to_world(rr.ravel(), cc.ravel())


@dataclass(frozen=True)
class ReflectivityMap:
    """Complex focused image over an imaging window.

    ``grid`` records the frequencies the map was formed over; it is None
    for maps re-loaded from exports.
    """

    values: np.ndarray
    window: ImagingWindow
    grid: FrequencyGrid | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.window.shape:
            raise ValueError("map shape does not match window")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DbImage:
    """Normalized power image in dB, clipped at a floor below the maximum."""

    values: np.ndarray
    floor_db: float


def mrt_weights(p, layout: ArrayLayout, f: float) -> np.ndarray:
    """Unit maximum-ratio weights focusing ``layout`` on point ``p``.

    Uses the line-of-sight, isotropic channel vector; the conjugated
    phases realize spherical-wavefront focusing.
    """
    h = _channel.smc_channel_vector(MirrorSource(1, layout), p, f)
    return np.conj(h) / np.linalg.norm(h)


def _focus_weights(dist: np.ndarray, lam: float) -> np.ndarray:
    """Row-normalized conjugate Friis steering for a (points, elements) grid."""
    h = (lam / (4.0 * np.pi * dist)) * np.exp(-2j * np.pi * dist / lam)
    w = np.conj(h)
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def reflectivity_map(H: ChannelMatrix, tx: ArrayLayout, rx: ArrayLayout,
                     window: ImagingWindow, grid: FrequencyGrid | None = None,
                     freq_stride: int = 1) -> ReflectivityMap:
    """Focused image I(p) = sum_i w_r(p,f_i)^T H(f_i) w_t(p,f_i).

    ``rx`` is the imaging receiver and must match the first axis of H;
    ``tx`` is the imaging transmitter and must match the second axis (the
    roles of the synthesis arrays swap when imaging). Weights are
    recomputed per frequency; the frequency sum runs in ascending order.
    ``freq_stride`` subsamples the grid for runtime control.
    """
    if grid is None:
        grid = H.grid
    m, n, nf = H.data.shape
    if len(rx) != m:
        raise ValueError(f"rx layout has {len(rx)} elements, H expects {m}")
    if len(tx) != n:
        raise ValueError(f"tx layout has {len(tx)} elements, H expects {n}")
    if len(grid) != nf:
        raise ValueError(f"grid has {len(grid)} frequencies, H expects {nf}")
    if freq_stride < 1:
        raise ValueError("freq_stride must be at least 1")

    pix = window.world_points()
    d_r = np.sqrt(np.sum((pix[:, None, :] - rx.elements[None, :, :]) ** 2, axis=-1))
    d_t = np.sqrt(np.sum((pix[:, None, :] - tx.elements[None, :, :]) ** 2, axis=-1))
    if np.any(d_r == 0.0) or np.any(d_t == 0.0):
        raise DegenerateGeometryError("a pixel coincides with an array element")

    acc = np.zeros(pix.shape[0], dtype=complex)
    for i in range(0, nf, freq_stride):
        lam = C0 / float(grid.freqs[i])
        w_r = _focus_weights(d_r, lam)
        w_t = _focus_weights(d_t, lam)
        acc += np.einsum("pn,pn->p", w_r @ H.data[:, :, i], w_t)
    return ReflectivityMap(acc.reshape(window.shape), window=window, grid=grid)


def to_db(rmap: ReflectivityMap, dynamic_range_db: float = 60.0) -> DbImage:
    """Power image 10*log10(|I|^2), normalized to a 0 dB peak and clipped.

    An all-zero map yields a uniform floor image.
    """
    if not dynamic_range_db > 0:
        raise ValueError("dynamic range must be positive")
    power = np.abs(rmap.values) ** 2
    peak = power.max()
    floor = -float(dynamic_range_db)
    if peak == 0.0:
        return DbImage(np.full(rmap.values.shape, floor), floor_db=floor)
    with np.errstate(divide="ignore"):
        vals = 10.0 * np.log10(power / peak)
    return DbImage(np.maximum(vals, floor), floor_db=floor)
