"""Colour and LBP-texture histograms over frame regions.

Colour histograms use 8x8x8 RGB bins weighted by the Epanechnikov-style
profile ``k(r) = 1 - r**2`` of each pixel's distance to the region centre,
scaled by the region diagonal.  Texture histograms count basic 3x3 LBP
labels (256 of them) over the region interior and are normalised to sum to
one so that the Bhattacharyya coefficient stays in ``[0, 1]``.

The batched functions (:func:`color_distances`, :func:`lbp_distances`) score
many candidate boxes against one reference in a single compiled pass; they
are what the particle filter calls every frame.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .core import Frame, Region, clamp_region
from .errors import AllZeroWeights, LengthMismatch, RegionTooSmall

COLOR_BINS = 512
LBP_BINS = 256

# clockwise from top-left, each entry is (row offset, col offset)
LBP_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def color_bin(r: int, g: int, b: int) -> int:
    return (int(r) // 32) * 64 + (int(g) // 32) * 8 + int(b) // 32


def kernel_weight(r: float) -> float:
    return 1.0 - r * r if 0 <= r < 1 else 0.0


def _cached(frame: Frame, key: str, build):
    try:
        return frame._cache[key]
    except KeyError:
        value = build(frame)
        value.flags.writeable = False
        frame._cache[key] = value
        return value


def color_bin_map(frame: Frame) -> np.ndarray:
    """Per-pixel colour bin index, shape ``(height, width)``."""

    def build(f):
        px = f.pixels.astype(np.int64) // 32
        return px[..., 0] * 64 + px[..., 1] * 8 + px[..., 2]

    return _cached(frame, "color_bins", build)


def gray_image(frame: Frame) -> np.ndarray:
    """Rec.601 luma rounded half-up to integers."""

    def build(f):
        px = f.pixels.astype(np.int64)
        return (299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2] + 500) // 1000

    return _cached(frame, "gray", build)


def lbp_label(patch) -> int:
    """Label of the centre of a 3x3 gray patch.

    A neighbour at least as bright as the centre sets its bit; bits run
    clockwise from the top-left neighbour, which is the most significant.
    """
    p = np.asarray(patch)
    if p.shape != (3, 3):
        raise ValueError(f"expected a 3x3 patch, got shape {p.shape}")
    centre = p[1, 1]
    label = 0
    for dr, dc in LBP_NEIGHBORS:
        label = (label << 1) | int(p[1 + dr, 1 + dc] >= centre)
    return label


def lbp_label_map(frame: Frame) -> np.ndarray:
    """LBP labels of every pixel with a full 3x3 neighbourhood.

    The one-pixel frame border gets label -1; region histograms never read it.
    """

    def build(f):
        g = gray_image(f)
        h, w = g.shape
        labels = np.full((h, w), -1, dtype=np.int64)
        if h < 3 or w < 3:
            return labels
        centre = g[1:-1, 1:-1]
        acc = np.zeros_like(centre)
        for dr, dc in LBP_NEIGHBORS:
            acc = (acc << 1) | (g[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc] >= centre)
        labels[1:-1, 1:-1] = acc
        return labels

    return _cached(frame, "lbp", build)


@njit(cache=True)
def _pixel_range(centre, size):
    # pixels whose centres fall in [centre - size/2, centre + size/2)
    return math.ceil(centre - size / 2 - 0.5), math.ceil(centre + size / 2 - 0.5)


@njit(cache=True)
def _accumulate_color(bins, cx, cy, w, h, hist):
    r0, r1 = _pixel_range(cy, h)
    c0, c1 = _pixel_range(cx, w)
    inv_d2 = 1.0 / (w * w + h * h)
    total = 0.0
    for r in range(r0, r1):
        dy = r + 0.5 - cy
        for c in range(c0, c1):
            dx = c + 0.5 - cx
            rr = (dx * dx + dy * dy) * inv_d2
            if rr < 1.0:
                k = 1.0 - rr
                hist[bins[r, c]] += k
                total += k
    return total


@njit(cache=True)
def _color_histogram(bins, cx, cy, w, h):
    hist = np.zeros(512)
    total = _accumulate_color(bins, cx, cy, w, h, hist)
    if total > 0.0:
        for u in range(512):
            hist[u] /= total
    return hist, total


@njit(cache=True)
def _half_sq_diff(mass, total, ref):
    # 1 - rho written as 0.5 * sum (sqrt p - sqrt q)^2; exact zero when p == q
    acc = 0.0
    for u in range(mass.shape[0]):
        diff = math.sqrt(mass[u] / total) - math.sqrt(ref[u])
        acc += diff * diff
    return 0.5 * acc


@njit(cache=True)
def _color_sq_distances(bins, boxes, ref):
    n = boxes.shape[0]
    out = np.empty(n)
    hist = np.zeros(512)
    for i in range(n):
        hist[:] = 0.0
        total = _accumulate_color(bins, boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3], hist)
        if total <= 0.0:
            out[i] = np.nan
            continue
        out[i] = _half_sq_diff(hist, total, ref)
    return out


@njit(cache=True)
def _lbp_counts(labels, cx, cy, w, h, counts):
    r0, r1 = _pixel_range(cy, h)
    c0, c1 = _pixel_range(cx, w)
    n = 0
    for r in range(r0 + 1, r1 - 1):
        for c in range(c0 + 1, c1 - 1):
            counts[labels[r, c]] += 1.0
            n += 1
    return n


@njit(cache=True)
def _lbp_sq_distances(labels, boxes, ref):
    n = boxes.shape[0]
    out = np.empty(n)
    counts = np.zeros(256)
    for i in range(n):
        counts[:] = 0.0
        total = _lbp_counts(labels, boxes[i, 0], boxes[i, 1], boxes[i, 2], boxes[i, 3], counts)
        if total == 0:
            out[i] = np.nan
            continue
        out[i] = _half_sq_diff(counts, float(total), ref)
    return out


def extract_color_histogram(frame: Frame, region: Region) -> np.ndarray:
    """Kernel-weighted 512-bin colour distribution of ``region``."""
    reg = clamp_region(region, frame.width, frame.height)
    hist, total = _color_histogram(color_bin_map(frame), reg.cx, reg.cy, float(reg.w), float(reg.h))
    if total <= 0.0:
        raise AllZeroWeights(f"every pixel of {reg} has zero kernel weight")
    return hist


def extract_lbp_histogram(frame: Frame, region: Region) -> np.ndarray:
    """Normalised 256-bin LBP label histogram over the interior of ``region``."""
    reg = clamp_region(region, frame.width, frame.height)
    rows, cols = reg.pixel_slices()
    if rows.stop - rows.start < 3 or cols.stop - cols.start < 3:
        raise RegionTooSmall(f"{reg} covers fewer than 3x3 pixels")
    inner = lbp_label_map(frame)[rows.start + 1 : rows.stop - 1, cols.start + 1 : cols.stop - 1]
    counts = np.bincount(inner.ravel(), minlength=LBP_BINS).astype(np.float64)
    return counts / counts.sum()


def bhattacharyya_coefficient(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise LengthMismatch(f"histogram shapes differ: {p.shape} vs {q.shape}")
    return float(np.sum(np.sqrt(p * q)))


def bhattacharyya_distance(p, q) -> float:
    """``sqrt(1 - rho(p, q))`` for two distributions of equal length.

    ``1 - rho`` is evaluated as ``0.5 * sum((sqrt(p) - sqrt(q))**2)``, which
    is the same quantity whenever both inputs sum to one but cannot go
    negative and is exactly zero for ``p == q``.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise LengthMismatch(f"histogram shapes differ: {p.shape} vs {q.shape}")
    return math.sqrt(min(1.0, 0.5 * float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))))


def color_distances(frame: Frame, boxes: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Bhattacharyya distances of clamped ``(cx, cy, w, h)`` boxes to ``ref``.

    Entries are NaN where a box has no kernel mass.
    """
    d2 = _color_sq_distances(color_bin_map(frame), np.ascontiguousarray(boxes, dtype=np.float64), ref)
    return np.sqrt(np.minimum(d2, 1.0))


def lbp_distances(frame: Frame, boxes: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Texture counterpart of :func:`color_distances`; NaN for boxes under 3x3."""
    d2 = _lbp_sq_distances(lbp_label_map(frame), np.ascontiguousarray(boxes, dtype=np.float64), ref)
    return np.sqrt(np.minimum(d2, 1.0))
