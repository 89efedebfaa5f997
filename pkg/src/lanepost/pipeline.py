"""Frame-level orchestration: mask in, fitted lanes out.

Stages run in fixed order (instance detection, BEV transform, voting,
curve fitting + back-projection) with a monotonic-clock timing around
each. Everything downstream of the mask is deterministic, so identical
mask + config always reproduce identical lanes; only timings vary.

Lane files hold one line per lane: `cluster_id c0 c1 c2 y_min y_max`
followed by the image-space polyline as `x,y` pairs, all numbers printed
with 9 significant digits.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .curves import LaneCurve, back_project, fit_curve, sample_curve
from .errors import ConfigError, FileFormatError
from .homography import estimate_homography, transform_instance
from .instances import Instance, label_instances
from .voting import BevInstance, Clustering, cluster_instances

__all__ = [
    "Lane",
    "StageTimings",
    "FrameResult",
    "crop_and_resize",
    "run_frame",
    "format_lanes",
    "parse_lanes",
    "write_lanes",
    "read_lanes",
]


@dataclass(frozen=True)
class StageTimings:
    """Wall-clock stage durations for one frame, in milliseconds."""

    instance_detection_ms: float
    bev_ms: float
    voting_ms: float
    fitting_ms: float

    @property
    def total_ms(self) -> float:
        return self.instance_detection_ms + self.bev_ms + self.voting_ms + self.fitting_ms


@dataclass(eq=False)
class Lane:
    curve: LaneCurve
    polyline: np.ndarray  # image-space (n, 2) points


@dataclass(eq=False)
class FrameResult:
    instances: list[Instance]
    clustering: Clustering
    lanes: list[Lane]
    timings: StageTimings

    @property
    def instance_count(self) -> int:
        return len(self.instances)

    @property
    def cluster_count(self) -> int:
        return self.clustering.num_clusters


def crop_and_resize(mask, cfg: PipelineConfig) -> np.ndarray:
    """Drop the configured margins, then nearest-neighbor resize to the
    target grid. An output pixel is true iff its nearest source pixel is."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2D, got shape {mask.shape}")
    height, width = mask.shape
    top, bottom = cfg.crop_top, height - cfg.crop_bottom
    left, right = cfg.crop_left, width - cfg.crop_right
    if bottom - top < 1 or right - left < 1:
        raise ConfigError(
            f"crop margins leave no pixels: {height}x{width} minus "
            f"({cfg.crop_top},{cfg.crop_bottom},{cfg.crop_left},{cfg.crop_right})"
        )
    cropped = mask[top:bottom, left:right] != 0
    ch, cw = cropped.shape
    row_idx = (np.arange(cfg.target_rows) * ch) // cfg.target_rows
    col_idx = (np.arange(cfg.target_cols) * cw) // cfg.target_cols
    return cropped[np.ix_(row_idx, col_idx)]


def run_frame(mask, cfg: PipelineConfig) -> FrameResult:
    """Run the post-segmentation pipeline on one mask at target size.

    A frame with no surviving instances yields an empty lane list, not an
    error.
    """
    mask = np.asarray(mask)
    if mask.shape != (cfg.target_rows, cfg.target_cols):
        raise ValueError(
            f"mask shape {mask.shape} != configured target "
            f"({cfg.target_rows}, {cfg.target_cols}); crop_and_resize first"
        )

    t0 = time.perf_counter()
    instances = label_instances(mask, cfg.connectivity, cfg.min_instance_size)
    t1 = time.perf_counter()

    h = estimate_homography(cfg.calibration)
    bev = [BevInstance.from_points(inst.id, transform_instance(h, inst)) for inst in instances]
    t2 = time.perf_counter()

    clustering = cluster_instances(bev, cfg.eta)
    t3 = time.perf_counter()

    lanes = []
    if clustering.num_clusters:
        h_inv = h.inverse()
        by_id = {b.id: b for b in bev}
        for cluster_id, member_ids in enumerate(clustering.members()):
            points = np.concatenate([by_id[i].points for i in member_ids])
            curve = fit_curve(points, cluster_id)
            samples = sample_curve(curve, cfg.sample_count)
            lanes.append(Lane(curve, back_project(h_inv, samples)))
    t4 = time.perf_counter()

    timings = StageTimings(
        instance_detection_ms=(t1 - t0) * 1e3,
        bev_ms=(t2 - t1) * 1e3,
        voting_ms=(t3 - t2) * 1e3,
        fitting_ms=(t4 - t3) * 1e3,
    )
    return FrameResult(instances, clustering, lanes, timings)


# ---------------------------------------------------------------------------
# lane text files
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.9g}"


def format_lanes(lanes) -> str:
    lines = []
    for lane in lanes:
        c = lane.curve
        head = [str(c.cluster_id), _fmt(c.c0), _fmt(c.c1), _fmt(c.c2), _fmt(c.y_min), _fmt(c.y_max)]
        pts = [f"{_fmt(x)},{_fmt(y)}" for x, y in lane.polyline]
        lines.append(" ".join(head + pts))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_lanes(text: str, source: str = "<string>") -> list[Lane]:
    """Inverse of format_lanes. The polynomial degree is not serialized and
    is inferred from which coefficients are nonzero."""
    lanes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 8:
            raise FileFormatError(source, f"line {lineno}: lane record too short")
        try:
            cluster_id = int(tokens[0])
            c0, c1, c2, y_min, y_max = (float(t) for t in tokens[1:6])
            points = []
            for tok in tokens[6:]:
                xs, ys = tok.split(",")
                points.append((float(xs), float(ys)))
        except ValueError as exc:
            raise FileFormatError(source, f"line {lineno}: {exc}") from exc
        degree = 2 if c2 != 0.0 else (1 if c1 != 0.0 else 0)
        curve = LaneCurve(c0, c1, c2, y_min, y_max, cluster_id, degree)
        lanes.append(Lane(curve, np.array(points, dtype=np.float64)))
    return lanes


def write_lanes(lanes, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_lanes(lanes))


def read_lanes(path) -> list[Lane]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileFormatError(path, f"cannot read lane file: {exc}") from exc
    return parse_lanes(text, source=str(path))
