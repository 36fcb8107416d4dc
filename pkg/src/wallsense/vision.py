"""Edge detection and straight-line extraction on radar images.

Self-contained implementations: Gaussian smoothing, 3x3 Sobel gradients,
non-maximum suppression along the quantized gradient direction, hysteresis
thresholding, and a Hesse-normal-form Hough accumulator with peak picking
and segment chaining. Lines found in pixel space are mapped to vertical
wall segments through the imaging window metadata.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import WallSegment
from .imaging import ImagingWindow


@dataclass(frozen=True)
class LineEstimate:
    """Detected line in Hesse normal form: rho = x*cos(theta) + y*sin(theta).

    x is the column index and y the row index; theta is measured from the
    column axis and lies in [0, pi). ``endpoints`` are the (row, col)
    pixels bounding the supporting segment; ``score`` is the accumulator
    vote count of the originating peak.
    """

    rho: float
    theta: float
    endpoints: tuple
    score: int


def _conv1d_zero(img: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """1-d correlation along an axis with zero padding, same size."""
    r = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    padded = np.pad(img, pad, mode="constant")
    out = np.zeros_like(img, dtype=float)
    for i, kv in enumerate(kernel):
        if axis == 0:
            out += kv * padded[i:i + img.shape[0], :]
        else:
            out += kv * padded[:, i:i + img.shape[1]]
    return out


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(np.ceil(4.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _shift(a: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """Shift with zero fill so that out[r, c] = a[r + dr, c + dc]."""
    out = np.zeros_like(a)
    rows, cols = a.shape
    rs = slice(max(dr, 0), rows + min(dr, 0))
    cs = slice(max(dc, 0), cols + min(dc, 0))
    rd = slice(max(-dr, 0), rows + min(-dr, 0))
    cd = slice(max(-dc, 0), cols + min(-dc, 0))
    out[rd, cd] = a[rs, cs]
    return out


# neighbor offsets (dr, dc) of the four quantized gradient directions
_NMS_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))


def canny_edges(img: np.ndarray, sigma: float = 2.0, low: float = 0.10,
                high: float = 0.25) -> np.ndarray:
    """Binary edge map of a gray image.

    ``low`` and ``high`` are hysteresis thresholds as fractions of the
    maximum gradient magnitude. Convolutions use zero padding; a border of
    width equal to the combined smoothing and gradient kernel radii is
    excluded from suppression and hysteresis to avoid padding artifacts.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise ValueError("image must be 2-d")
    if not np.all(np.isfinite(img)):
        raise ValueError("image must be finite")
    if not (0 < low < high <= 1):
        raise ValueError("need 0 < low < high <= 1")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")

    g_radius = int(np.ceil(4.0 * sigma)) if sigma > 0 else 0
    border = g_radius + 1  # +1 for the Sobel kernel radius
    if min(img.shape) < max(2 * g_radius + 1, 3):
        raise ValueError("image smaller than the smoothing kernel")

    if sigma > 0:
        k = _gaussian_kernel(sigma)
        img = _conv1d_zero(_conv1d_zero(img, k, axis=0), k, axis=1)

    # separable 3x3 Sobel: gx along columns, gy along rows
    smooth = np.array([1.0, 2.0, 1.0])
    diff = np.array([-1.0, 0.0, 1.0])
    gx = _conv1d_zero(_conv1d_zero(img, smooth, axis=0), diff, axis=1)
    gy = _conv1d_zero(_conv1d_zero(img, diff, axis=0), smooth, axis=1)
    mag = np.hypot(gx, gy)

    interior = np.zeros(img.shape, dtype=bool)
    if img.shape[0] > 2 * border and img.shape[1] > 2 * border:
        interior[border:-border, border:-border] = True
    mag_max = mag[interior].max() if interior.any() else 0.0
    if mag_max == 0.0:
        return np.zeros(img.shape, dtype=bool)

    # quantize gradient direction into 4 bins over [0, pi)
    ang = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.zeros(img.shape, dtype=np.int8)
    bins[(ang >= np.pi / 8) & (ang < 3 * np.pi / 8)] = 1
    bins[(ang >= 3 * np.pi / 8) & (ang < 5 * np.pi / 8)] = 2
    bins[(ang >= 5 * np.pi / 8) & (ang < 7 * np.pi / 8)] = 3

    # keep local maxima along the gradient; the strict test on the backward
    # neighbor breaks exact ties so ridges stay one pixel wide
    keep = np.zeros(img.shape, dtype=bool)
    for b, (dr, dc) in enumerate(_NMS_OFFSETS):
        fwd = _shift(mag, dr, dc)
        bwd = _shift(mag, -dr, -dc)
        keep |= (bins == b) & (mag >= fwd) & (mag > bwd)
    keep &= interior

    strong = keep & (mag >= high * mag_max)
    weak = keep & (mag >= low * mag_max)

    # grow strong seeds through weak pixels, 8-connected
    edges = strong.copy()
    while True:
        grown = np.zeros_like(edges)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if dr or dc:
                    grown |= _shift(edges, dr, dc)
        new = edges | (grown & weak)
        if np.array_equal(new, edges):
            return edges
        edges = new


def hough_accumulator(edges: np.ndarray, d_rho: float = 1.0,
                      d_theta: float = np.deg2rad(1.0)):
    """Vote accumulator over (rho, theta) bins.

    Returns (acc, rho_centers, theta_centers); every edge pixel casts one
    vote per theta bin.
    """
    if not d_rho > 0 or not d_theta > 0:
        raise ValueError("bin sizes must be positive")
    edges = np.asarray(edges, dtype=bool)
    ys, xs = np.nonzero(edges)
    n_theta = max(1, int(round(np.pi / d_theta)))
    thetas = np.arange(n_theta) * d_theta
    diag = float(np.hypot(edges.shape[0] - 1, edges.shape[1] - 1))
    n_half = int(np.ceil(diag / d_rho))
    rhos = (np.arange(2 * n_half + 1) - n_half) * d_rho
    acc = np.zeros((2 * n_half + 1, n_theta), dtype=np.int64)
    if ys.size:
        for t in range(n_theta):
            rho = xs * np.cos(thetas[t]) + ys * np.sin(thetas[t])
            idx = np.round(rho / d_rho).astype(int) + n_half
            acc[:, t] = np.bincount(idx, minlength=acc.shape[0])
    return acc, rhos, thetas


def _chain_segment(xs, ys, theta: float, fill_gap: float, min_len: float):
    """Longest run of pixels along the line, bridging small gaps.

    Pixels are ordered by their coordinate along the line; runs split where
    consecutive pixels are more than ``fill_gap`` apart, and runs shorter
    than ``min_len`` (end-to-end) are discarded.
    """
    t = -xs * np.sin(theta) + ys * np.cos(theta)
    order = np.argsort(t, kind="stable")
    xs, ys = xs[order], ys[order]
    gaps = np.hypot(np.diff(xs.astype(float)), np.diff(ys.astype(float)))
    breaks = np.flatnonzero(gaps > fill_gap)
    starts = np.concatenate(([0], breaks + 1))
    stops = np.concatenate((breaks, [xs.size - 1]))
    best = None
    best_len = -1.0
    for s, e in zip(starts, stops):
        length = float(np.hypot(float(xs[e]) - float(xs[s]),
                                float(ys[e]) - float(ys[s])))
        if length >= min_len and length > best_len:
            best_len = length
            best = ((int(ys[s]), int(xs[s])), (int(ys[e]), int(xs[e])))
    return best


def hough_lines(edges: np.ndarray, d_rho: float = 1.0,
                d_theta: float = np.deg2rad(1.0), n_peaks: int = 4,
                nms: tuple = (9, 5), min_len: float = 15.0,
                fill_gap: float = 5.0) -> list[LineEstimate]:
    """Extract up to ``n_peaks`` line segments from a binary edge map.

    Peaks are taken in descending vote order with rectangular suppression
    of ``nms`` = (rho_bins, theta_bins) around each accepted peak. For each
    peak, edge pixels within half a rho bin of the line are chained into
    segments; the longest chain at least ``min_len`` pixels long becomes
    the reported segment. Output is sorted by descending score with ties
    broken by ascending (theta, rho).
    """
    if n_peaks < 1:
        raise ValueError("n_peaks must be at least 1")
    edges = np.asarray(edges, dtype=bool)
    acc, rhos, thetas = hough_accumulator(edges, d_rho, d_theta)
    ys, xs = np.nonzero(edges)
    if ys.size == 0:
        return []
    half_r = int(nms[0]) // 2
    half_t = int(nms[1]) // 2
    work = acc.copy()
    lines = []
    for _ in range(n_peaks):
        flat = int(np.argmax(work))
        ri, ti = np.unravel_index(flat, work.shape)
        votes = int(work[ri, ti])
        if votes <= 0:
            break
        work[max(ri - half_r, 0):ri + half_r + 1,
             max(ti - half_t, 0):ti + half_t + 1] = 0
        theta = float(thetas[ti])
        rho = float(rhos[ri])
        dist = np.abs(xs * np.cos(theta) + ys * np.sin(theta) - rho)
        on_line = dist <= d_rho / 2.0
        if not on_line.any():
            continue
        seg = _chain_segment(xs[on_line], ys[on_line], theta, fill_gap, min_len)
        if seg is not None:
            lines.append(LineEstimate(rho=rho, theta=theta, endpoints=seg,
                                      score=votes))
    lines.sort(key=lambda ln: (-ln.score, ln.theta, ln.rho))
    return lines


def lines_to_walls(lines, window: ImagingWindow, height: float = 2.0,
                   floor_z: float = 0.0) -> list[WallSegment]:
    """Map pixel-space line segments to vertical walls in world coordinates.

    Segment endpoints land on the window plane and are dropped to
    ``floor_z``; walls extend vertically by ``height``.
    """
    walls = []
    for ln in lines:
        (r0, c0), (r1, c1) = ln.endpoints
        a = window.pixel_to_world(float(r0), float(c0)).copy()
        b = window.pixel_to_world(float(r1), float(c1)).copy()
        a[2] = floor_z
        b[2] = floor_z
        walls.append(WallSegment(a=a, b=b, height_m=height))
    return walls
