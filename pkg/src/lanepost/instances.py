"""Connected lane-marking instances in a binary mask.

Labeling is an iterative breadth-first flood fill over the true pixels,
never recursion: real masks contain components of ~10^4 pixels. Component
ids follow the row-major scan order of each component's first pixel, so a
given mask always labels identically.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = ["Instance", "label_instances", "extremal_pixels"]

_OFFSETS_4 = ((-1, 0), (0, -1), (0, 1), (1, 0))
_OFFSETS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(eq=False)
class Instance:
    """One connected blob of lane-marking pixels.

    pixels is an (n, 2) int array of (row, col) in BFS visit order;
    bbox is (min_row, min_col, max_row, max_col), tight.
    """

    id: int
    pixels: np.ndarray
    size: int
    bbox: tuple[int, int, int, int]


def label_instances(mask, connectivity: int = 8, min_size: int = 0) -> list[Instance]:
    """Split a boolean mask into connected components.

    Components smaller than min_size pixels are dropped (segmentation
    speckle); survivors get dense ids 0..n-1 in scan order. 8-connectivity
    is the default because thin diagonal markings fragment under 4.
    """
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
        raise ValueError(f"mask must be a non-empty 2D grid, got shape {mask.shape}")
    if connectivity not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    if min_size < 0:
        raise ValueError(f"min_size must be non-negative, got {min_size}")

    height, width = mask.shape
    truth = bytes(np.ascontiguousarray(mask != 0, dtype=np.uint8).ravel())
    visited = bytearray(height * width)
    offsets = _OFFSETS_4 if connectivity == 4 else _OFFSETS_8

    instances = []
    for seed in np.flatnonzero(np.frombuffer(truth, dtype=np.uint8)):
        seed = int(seed)
        if visited[seed]:
            continue
        visited[seed] = 1
        queue = deque((seed,))
        component = []
        while queue:
            idx = queue.popleft()
            component.append(idx)
            r, c = divmod(idx, width)
            for dr, dc in offsets:
                nr = r + dr
                nc = c + dc
                if 0 <= nr < height and 0 <= nc < width:
                    nidx = nr * width + nc
                    if truth[nidx] and not visited[nidx]:
                        visited[nidx] = 1
                        queue.append(nidx)
        if len(component) < min_size:
            continue
        flat = np.asarray(component, dtype=np.int64)
        pixels = np.empty((len(component), 2), dtype=np.int32)
        pixels[:, 0] = flat // width
        pixels[:, 1] = flat % width
        bbox = (
            int(pixels[:, 0].min()),
            int(pixels[:, 1].min()),
            int(pixels[:, 0].max()),
            int(pixels[:, 1].max()),
        )
        instances.append(Instance(len(instances), pixels, len(component), bbox))
    return instances


def extremal_pixels(inst: Instance) -> tuple[tuple[int, int], tuple[int, int]]:
    """(bottom, top) pixels of an instance as (row, col) pairs.

    Bottom has the maximum row (image bottom), top the minimum; row ties
    break toward the minimum column.
    """
    if inst.pixels is None or len(inst.pixels) == 0:
        raise ValueError("instance has no pixels")
    rows = inst.pixels[:, 0]
    cols = inst.pixels[:, 1]
    bottom_row = int(rows.max())
    top_row = int(rows.min())
    bottom = (bottom_row, int(cols[rows == bottom_row].min()))
    top = (top_row, int(cols[rows == top_row].min()))
    return bottom, top
