"""Throughput measurement for the post-segmentation pipeline.

One untimed warm-up pass over all frames precedes the measured
repetitions, so cold caches and lazy allocations do not pollute the
statistics. fps is defined as 1000 / (mean total ms per frame).

Frames can run on a thread pool; every frame is still processed
single-threaded, and single-threaded mode is the reference configuration
for reported throughput.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import ConfigError
from .pipeline import run_frame

__all__ = ["BenchReport", "benchmark", "format_report"]

_STAGES = ("instance_detection", "bev", "voting", "fitting")


@dataclass(frozen=True)
class BenchReport:
    frames: int
    repetitions: int
    threads: int
    stage_mean_ms: dict
    stage_std_ms: dict
    total_mean_ms: float
    total_std_ms: float
    fps: float


def benchmark(masks, cfg: PipelineConfig, repetitions: int = 1, threads: int = 1) -> BenchReport:
    masks = list(masks)
    if not masks:
        raise ConfigError("benchmark needs at least one frame")
    if repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {repetitions}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")

    def run_pass():
        if threads == 1:
            return [run_frame(m, cfg).timings for m in masks]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return [r.timings for r in pool.map(lambda m: run_frame(m, cfg), masks)]

    run_pass()  # warm-up, excluded from statistics
    timings = []
    for _ in range(repetitions):
        timings.extend(run_pass())

    per_stage = {
        "instance_detection": np.array([t.instance_detection_ms for t in timings]),
        "bev": np.array([t.bev_ms for t in timings]),
        "voting": np.array([t.voting_ms for t in timings]),
        "fitting": np.array([t.fitting_ms for t in timings]),
    }
    totals = sum(per_stage.values())
    total_mean = float(totals.mean())
    return BenchReport(
        frames=len(masks),
        repetitions=repetitions,
        threads=threads,
        stage_mean_ms={k: float(v.mean()) for k, v in per_stage.items()},
        stage_std_ms={k: float(v.std()) for k, v in per_stage.items()},
        total_mean_ms=total_mean,
        total_std_ms=float(totals.std()),
        fps=1000.0 / total_mean,
    )


def format_report(report: BenchReport) -> str:
    lines = [
        f"frames={report.frames} repetitions={report.repetitions} threads={report.threads}",
        f"{'stage':<20}{'mean ms':>12}{'std ms':>12}",
    ]
    for stage in _STAGES:
        lines.append(
            f"{stage:<20}{report.stage_mean_ms[stage]:>12.4f}{report.stage_std_ms[stage]:>12.4f}"
        )
    lines.append(f"{'total':<20}{report.total_mean_ms:>12.4f}{report.total_std_ms:>12.4f}")
    lines.append(f"fps={report.fps:.2f}")
    return "\n".join(lines)
