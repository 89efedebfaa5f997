"""Seeded synthetic scenes with exact ground truth, plus pipeline scoring.

A scene starts from known quadratic lane dividers in BEV space. Dashes are
rasterized into the image-plane mask through the inverse calibration, some
dashes are deleted to mimic occlusion, and a fraction of pixels is flipped
as segmentation noise. Only what survives into the mask counts as truth:
each divider's recorded y extent covers its visible dashes, never occluded
road a detector could not possibly report.

Assignment map encoding: 0 = background, divider_id + 1 = marking pixel,
255 = noise pixel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import ConfigError, FileFormatError
from .homography import estimate_homography
from .pipeline import FrameResult

__all__ = [
    "SceneParams",
    "TruthCurve",
    "SyntheticScene",
    "EvalMetrics",
    "generate_scene",
    "evaluate",
    "best_lateral_errors",
    "write_truth_curves",
    "read_truth_curves",
]

NOISE_ID = 255

_RASTER_Y_STEP = 0.25
_RASTER_X_STEP = 0.5


@dataclass(frozen=True)
class SceneParams:
    num_lanes: int = 3
    curvature_range: float = 2e-4
    dash_length: float = 40.0
    gap_length: float = 20.0
    dash_width: float = 4.0
    noise_rate: float = 0.0
    occlusion_rate: float = 0.0

    def __post_init__(self):
        if self.num_lanes < 1:
            raise ConfigError(f"num_lanes must be >= 1, got {self.num_lanes}")
        if self.curvature_range < 0:
            raise ConfigError("curvature_range must be non-negative")
        if self.dash_length <= 0 or self.dash_width <= 0:
            raise ConfigError("dash dimensions must be positive")
        if self.gap_length < 0:
            raise ConfigError("gap_length must be non-negative")
        if not (0.0 <= self.noise_rate <= 1.0 and 0.0 <= self.occlusion_rate <= 1.0):
            raise ConfigError("noise_rate and occlusion_rate must lie in [0, 1]")


@dataclass(frozen=True)
class TruthCurve:
    """x = c2*y^2 + c1*y + c0 in BEV, visible over y in [y_lo, y_hi]."""

    divider_id: int
    c0: float
    c1: float
    c2: float
    y_lo: float
    y_hi: float

    def eval(self, y):
        return (self.c2 * y + self.c1) * y + self.c0


@dataclass(eq=False)
class SyntheticScene:
    mask: np.ndarray
    truth_curves: list[TruthCurve]
    truth_assignment: np.ndarray
    seed: int = 0
    params: SceneParams | None = None


def generate_scene(params: SceneParams, seed: int, cfg: PipelineConfig) -> SyntheticScene:
    """Deterministic scene for a seed: same seed, bit-identical output."""
    rng = np.random.default_rng(seed)
    rows, cols = cfg.target_rows, cfg.target_cols
    h_inv = estimate_homography(cfg.calibration).inverse()

    dst_x = [p[0] for p in cfg.calibration.dst]
    dst_y = [p[1] for p in cfg.calibration.dst]
    x_lo, x_hi = min(dst_x), max(dst_x)
    y_lo, y_hi = min(dst_y), max(dst_y)

    margin = 0.08 * (x_hi - x_lo)
    centers = np.linspace(x_lo + margin, x_hi - margin, params.num_lanes)
    spacing = (x_hi - x_lo - 2 * margin) / max(params.num_lanes - 1, 1)

    # one road curvature/heading shared by all dividers so they stay parallel
    road_c2 = rng.uniform(-params.curvature_range, params.curvature_range)
    road_c1 = rng.uniform(-0.05, 0.05)
    y_ref = (y_lo + y_hi) / 2.0

    mask = np.zeros((rows, cols), dtype=bool)
    assignment = np.zeros((rows, cols), dtype=np.uint8)
    curves = []
    period = params.dash_length + params.gap_length

    for divider in range(params.num_lanes):
        base = float(centers[divider] + rng.uniform(-0.1, 0.1) * spacing)
        c2 = float(road_c2 * rng.uniform(0.9, 1.1))
        c1_local = float(road_c1 + rng.uniform(-0.01, 0.01))
        # expand x = base + c1_local*(y - y_ref) + c2*(y - y_ref)^2 in powers of y
        c1 = c1_local - 2.0 * c2 * y_ref
        c0 = base - c1_local * y_ref + c2 * y_ref * y_ref

        phase = float(rng.uniform(0.0, period))
        visible_lo = np.inf
        visible_hi = -np.inf
        start = y_lo + phase - period
        while start < y_hi:
            dash_lo = max(start, y_lo)
            dash_hi = min(start + params.dash_length, y_hi)
            start += period
            if dash_hi <= dash_lo:
                continue
            if rng.random() < params.occlusion_rate:
                continue
            ys = np.arange(dash_lo, dash_hi, _RASTER_Y_STEP)
            offsets = np.arange(
                -params.dash_width / 2.0 + _RASTER_X_STEP / 2.0,
                params.dash_width / 2.0,
                _RASTER_X_STEP,
            )
            xs = (c2 * ys + c1) * ys + c0
            grid_x = (xs[:, None] + offsets[None, :]).ravel()
            grid_y = np.repeat(ys, len(offsets))
            img = h_inv.apply(np.stack([grid_x, grid_y], axis=1))
            pr = np.floor(img[:, 1]).astype(np.int64)
            pc = np.floor(img[:, 0]).astype(np.int64)
            keep = (pr >= 0) & (pr < rows) & (pc >= 0) & (pc < cols)
            if not keep.any():
                continue
            mask[pr[keep], pc[keep]] = True
            assignment[pr[keep], pc[keep]] = divider + 1
            visible_lo = min(visible_lo, float(grid_y[keep].min()))
            visible_hi = max(visible_hi, float(grid_y[keep].max()))
        if np.isfinite(visible_lo):
            curves.append(TruthCurve(divider, c0, c1, c2, visible_lo, visible_hi))

    if params.noise_rate > 0.0:
        flips = rng.random((rows, cols)) < params.noise_rate
        turned_on = flips & ~mask
        turned_off = flips & mask
        mask ^= flips
        assignment[turned_off] = 0
        assignment[turned_on] = NOISE_ID

    return SyntheticScene(mask, curves, assignment, seed, params)


# ---------------------------------------------------------------------------
# scoring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalMetrics:
    purity: float
    recall: float
    mean_lateral_error: float
    instance_count: int
    cluster_count: int
    divider_count: int
    matched_dividers: int


def best_lateral_errors(truth_curves, lane_curves, grid: int = 100) -> list[float]:
    """Per truth divider: the best (smallest) mean |x_fit - x_truth| over
    the divider's visible y range, across all fitted curves. inf when there
    are no fitted curves."""
    errors = []
    for truth in truth_curves:
        ys = np.linspace(truth.y_lo, truth.y_hi, grid)
        tx = truth.eval(ys)
        best = np.inf
        for curve in lane_curves:
            best = min(best, float(np.abs(curve.eval(ys) - tx).mean()))
        errors.append(best)
    return errors


def evaluate(result: FrameResult, scene: SyntheticScene, lateral_tolerance: float = 2.0) -> EvalMetrics:
    """Score a pipeline result against its scene.

    Purity: an instance is pure when its majority truth divider equals its
    cluster's (pixel-weighted) majority divider. Recall: a divider counts
    as found when some fitted curve tracks it within lateral_tolerance BEV
    pixels on average. Mean lateral error averages the per-divider best
    errors (over matched dividers).
    """
    rows, cols = scene.truth_assignment.shape
    for inst in result.instances:
        r = inst.pixels[:, 0]
        c = inst.pixels[:, 1]
        if r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols:
            raise ValueError("result does not match scene: instance pixel out of bounds")
        if not scene.mask[r, c].all():
            raise ValueError("result does not match scene: instance pixel not in mask")

    # majority truth divider per instance, then pixel-weighted per cluster
    inst_label = {}
    cluster_votes: dict[int, dict[int, int]] = {}
    for inst in result.instances:
        vals = scene.truth_assignment[inst.pixels[:, 0], inst.pixels[:, 1]]
        marking = vals[(vals != 0) & (vals != NOISE_ID)]
        ids, counts = np.unique(marking, return_counts=True)
        if len(ids):
            label = int(ids[counts.argmax()])  # ties go to the smallest id
            weight = int(counts.max())
        else:
            label = NOISE_ID
            weight = inst.size
        inst_label[inst.id] = label
        cid = result.clustering.assignment[inst.id]
        votes = cluster_votes.setdefault(cid, {})
        votes[label] = votes.get(label, 0) + weight

    cluster_label = {
        cid: max(votes, key=lambda k: (votes[k], -k)) for cid, votes in cluster_votes.items()
    }
    pure = sum(
        1
        for inst in result.instances
        if inst_label[inst.id] == cluster_label[result.clustering.assignment[inst.id]]
    )
    purity = pure / len(result.instances) if result.instances else 1.0

    errors = best_lateral_errors(scene.truth_curves, [lane.curve for lane in result.lanes])
    matched = [e for e in errors if e < lateral_tolerance]
    recall = len(matched) / len(errors) if errors else 1.0
    mean_err = float(np.mean(matched)) if matched else float("inf")

    return EvalMetrics(
        purity=purity,
        recall=recall,
        mean_lateral_error=mean_err,
        instance_count=result.instance_count,
        cluster_count=result.cluster_count,
        divider_count=len(errors),
        matched_dividers=len(matched),
    )


# ---------------------------------------------------------------------------
# truth text files (same record shape as lane files, no polyline)
# ---------------------------------------------------------------------------

def write_truth_curves(curves, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in curves:
            fh.write(
                f"{t.divider_id} {t.c0:.9g} {t.c1:.9g} {t.c2:.9g} {t.y_lo:.9g} {t.y_hi:.9g}\n"
            )


def read_truth_curves(path) -> list[TruthCurve]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FileFormatError(path, f"cannot read truth file: {exc}") from exc
    curves = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 6:
            raise FileFormatError(path, f"line {lineno}: expected 6 fields, got {len(tokens)}")
        try:
            curves.append(
                TruthCurve(
                    int(tokens[0]),
                    float(tokens[1]),
                    float(tokens[2]),
                    float(tokens[3]),
                    float(tokens[4]),
                    float(tokens[5]),
                )
            )
        except ValueError as exc:
            raise FileFormatError(path, f"line {lineno}: {exc}") from exc
    return curves
