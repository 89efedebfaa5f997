"""RGB overlay rendering: gray mask background, fitted lanes on top as
3-px-wide polylines in distinct fixed colors (cycling palette)."""

from __future__ import annotations

import numpy as np

__all__ = ["render_overlay", "PALETTE"]

PALETTE = (
    (230, 60, 60),
    (60, 200, 90),
    (70, 120, 235),
    (235, 200, 60),
    (200, 80, 220),
    (60, 205, 215),
    (245, 140, 40),
)
_MASK_GRAY = 96


def _stamp_segment(img, p0, p1, color):
    length = float(np.hypot(p1[0] - p0[0], p1[1] - p0[1]))
    steps = max(2, int(np.ceil(length / 0.5)) + 1)
    ts = np.linspace(0.0, 1.0, steps)
    cs = np.floor(p0[0] + ts * (p1[0] - p0[0])).astype(np.int64)
    rs = np.floor(p0[1] + ts * (p1[1] - p0[1])).astype(np.int64)
    height, width = img.shape[:2]
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            r = rs + dr
            c = cs + dc
            keep = (r >= 0) & (r < height) & (c >= 0) & (c < width)
            img[r[keep], c[keep]] = color


def render_overlay(mask, lanes) -> np.ndarray:
    """(H, W, 3) uint8 image: mask pixels gray, one color per lane."""
    mask = np.asarray(mask) != 0
    img = np.zeros((*mask.shape, 3), dtype=np.uint8)
    img[mask] = _MASK_GRAY
    for i, lane in enumerate(lanes):
        color = np.array(PALETTE[i % len(PALETTE)], dtype=np.uint8)
        poly = np.asarray(lane.polyline)
        for j in range(len(poly) - 1):
            _stamp_segment(img, poly[j], poly[j + 1], color)
    return img
