"""Antenna array layouts, vertical wall planes, and image-source construction.

World frame is right-handed with z pointing up; all lengths in meters.
Reflections at flat vertical surfaces are modeled by mirroring the array
across the infinite plane that contains the wall segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-12


def as_point(p) -> np.ndarray:
    """Coerce to a finite float 3-vector."""
    q = np.asarray(p, dtype=float)
    if q.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("point has non-finite components")
    return q


def _unit(v, name: str) -> np.ndarray:
    v = as_point(v)
    n = float(np.linalg.norm(v))
    if n < _EPS:
        raise ValueError(f"{name} must be a nonzero direction")
    return v / n


@dataclass(frozen=True)
class ArrayLayout:
    """Ordered antenna element positions, shape (n, 3) in meters.

    The row order is stable and defines the element index used by every
    channel and beamforming routine.
    """

    elements: np.ndarray
    label: str = ""

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=float)
        if el.ndim != 2 or el.shape[1] != 3 or el.shape[0] < 1:
            raise ValueError("elements must be a non-empty (n, 3) array")
        if not np.all(np.isfinite(el)):
            raise ValueError("elements contain non-finite values")
        object.__setattr__(self, "elements", el)

    def __len__(self) -> int:
        return self.elements.shape[0]

    @property
    def centroid(self) -> np.ndarray:
        return self.elements.mean(axis=0)


@dataclass(frozen=True)
class WallSegment:
    """Flat vertical wall: endpoints at a common height plus vertical extent.

    The endpoints record the observed extent; mirroring always uses the
    infinite vertical plane through the segment (no visibility gating).
    ``height_m=None`` means unbounded vertical extent.
    """

    a: np.ndarray
    b: np.ndarray
    height_m: float | None = None
    reflection_coeff: complex = 1.0 + 0.0j

    def __post_init__(self):
        a = as_point(self.a)
        b = as_point(self.b)
        if np.linalg.norm(b - a) < _EPS:
            raise ValueError("wall endpoints coincide")
        if abs(a[2] - b[2]) > _EPS:
            raise ValueError("wall endpoints must share the same height")
        g = complex(self.reflection_coeff)
        if abs(g) > 1.0 + 1e-9:
            raise ValueError("|reflection_coeff| must not exceed 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "reflection_coeff", g)
        if self.height_m is not None and not self.height_m > 0:
            raise ValueError("height_m must be positive or None")

    @property
    def direction(self) -> np.ndarray:
        """Unit vector from a to b (horizontal)."""
        d = self.b - self.a
        return d / np.linalg.norm(d)

    @property
    def normal(self) -> np.ndarray:
        """Horizontal unit normal of the wall plane."""
        d = self.direction
        return np.array([d[1], -d[0], 0.0])

    @property
    def length_m(self) -> float:
        return float(np.linalg.norm(self.b - self.a))


@dataclass(frozen=True)
class MirrorSource:
    """Virtual array created by reflecting the physical one across a wall.

    ``k=1`` denotes the physical array itself (line of sight); mirrored
    copies follow with k = 2, 3, ...
    """

    k: int
    layout: ArrayLayout
    reflection_coeff: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("mirror-source index k starts at 1")
        if self.k == 1 and complex(self.reflection_coeff) != 1.0 + 0.0j:
            raise ValueError("the k=1 (direct) source must have unit coefficient")
        object.__setattr__(self, "reflection_coeff", complex(self.reflection_coeff))


def ula_layout(n: int, spacing: float, center, axis, label: str = "") -> ArrayLayout:
    """Uniform linear array: n collinear elements centered on ``center``.

    Adjacent elements are ``spacing`` meters apart and indexed in order
    along ``axis``.
    """
    if n < 1:
        raise ValueError("element count must be at least 1")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    c = as_point(center)
    u = _unit(axis, "axis")
    offsets = (np.arange(n) - (n - 1) / 2.0) * spacing
    return ArrayLayout(c[None, :] + offsets[:, None] * u[None, :], label=label)


def ura_layout(rows: int, cols: int, spacing: float, center, normal,
               label: str = "") -> ArrayLayout:
    """Uniform rectangular array on the plane through ``center``.

    Elements are indexed row-major. The in-plane axes are chosen
    deterministically from ``normal``: the column axis is the horizontal
    direction ``z_hat x normal`` (falling back to the x-axis when the
    plane is horizontal) and the row axis completes the right-handed set.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be at least 1")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    c = as_point(center)
    nrm = _unit(normal, "normal")
    z_hat = np.array([0.0, 0.0, 1.0])
    u = np.cross(z_hat, nrm)
    if np.linalg.norm(u) < _EPS:
        u = np.array([1.0, 0.0, 0.0])
    else:
        u = u / np.linalg.norm(u)
    v = np.cross(nrm, u)
    r_idx, c_idx = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    du = (c_idx.ravel() - (cols - 1) / 2.0) * spacing
    dv = (r_idx.ravel() - (rows - 1) / 2.0) * spacing
    pts = c[None, :] + du[:, None] * u[None, :] + dv[:, None] * v[None, :]
    return ArrayLayout(pts, label=label)


def mirror_point(p, wall: WallSegment) -> np.ndarray:
    """Reflect a point across the infinite vertical plane of ``wall``."""
    q = as_point(p)
    n = wall.normal
    return q - 2.0 * np.dot(q - wall.a, n) * n


def mirror_layout(layout: ArrayLayout, wall: WallSegment) -> ArrayLayout:
    """Element-wise reflection of a layout; index order is preserved."""
    n = wall.normal
    dist = (layout.elements - wall.a[None, :]) @ n
    mirrored = layout.elements - 2.0 * dist[:, None] * n[None, :]
    return ArrayLayout(mirrored, label=layout.label)


def mirror_sources(layout: ArrayLayout, walls) -> list[MirrorSource]:
    """Direct source plus one first-order mirror source per wall.

    The k=1 entry is the physical layout; walls contribute k = 2..K in
    input order, carrying their reflection coefficients.
    """
    out = [MirrorSource(1, layout, 1.0 + 0.0j)]
    for i, wall in enumerate(walls):
        out.append(MirrorSource(i + 2, mirror_layout(layout, wall),
                                wall.reflection_coeff))
    return out
