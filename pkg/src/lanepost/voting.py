"""Group lane-marking instances into lane dividers by pairwise voting.

Every instance gets a straight line fitted through its BEV points
(x as a function of y, because markings are near-vertical in BEV and
regressing y on x would be degenerate). For a pair of instances, the
facing point P sits midway between their nearest facing endpoints; the
pair's vote is the sum of P's perpendicular distances to the two fitted
lines. Collinear segments of one dashed divider vote ~0 and merge, while
markings of a neighboring divider stay a lane-width apart. Votes under the
threshold eta define a graph whose connected components are the dividers.

Pairs are visited in canonical (min id, max id) order and the facing-point
construction is order-independent, so results are bitwise deterministic
and invariant to input permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError

__all__ = ["BevInstance", "FittedLine", "Clustering", "fit_line", "facing_point", "vote", "cluster_instances"]

_SAME_Y_TOL = 1e-9


@dataclass(eq=False)
class BevInstance:
    """An instance's pixels mapped into BEV space.

    bottom is the member point with maximum y (nearest the camera), top the
    minimum; ties break toward minimum x.
    """

    id: int
    points: np.ndarray
    bottom: tuple[float, float]
    top: tuple[float, float]

    @classmethod
    def from_points(cls, instance_id: int, points) -> "BevInstance":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise ValueError(f"expected a non-empty (n, 2) point array, got shape {pts.shape}")
        ys = pts[:, 1]
        y_max = ys.max()
        y_min = ys.min()
        bottom = (float(pts[ys == y_max, 0].min()), float(y_max))
        top = (float(pts[ys == y_min, 0].min()), float(y_min))
        return cls(instance_id, pts, bottom, top)


@dataclass(frozen=True)
class FittedLine:
    """x = a*y + b. vertical_fallback marks the single-point case, where the
    line degenerates to the vertical through that point (a = 0, b = x0)."""

    a: float
    b: float
    vertical_fallback: bool = False

    def distance_to(self, x: float, y: float) -> float:
        """Perpendicular distance from (x, y) to the line."""
        return abs(x - self.a * y - self.b) / math.sqrt(1.0 + self.a * self.a)


def fit_line(points) -> FittedLine:
    """Least-squares line x = a*y + b through a point set.

    A single point yields the vertical fallback. Multiple points sharing
    one y value (within 1e-9) describe a horizontal marking, which cannot
    occur for real lanes in BEV and signals upstream mislabeling.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError(f"expected a non-empty (n, 2) point array, got shape {pts.shape}")
    if len(pts) == 1:
        return FittedLine(0.0, float(pts[0, 0]), vertical_fallback=True)
    xs = pts[:, 0]
    ys = pts[:, 1]
    if float(ys.max() - ys.min()) <= _SAME_Y_TOL:
        raise DegenerateGeometryError(
            f"all {len(pts)} points share y ~ {float(ys[0])}; cannot fit x = f(y)"
        )
    y_mean = ys.mean()
    x_mean = xs.mean()
    dy = ys - y_mean
    a = float((dy * (xs - x_mean)).sum() / (dy * dy).sum())
    b = float(x_mean - a * y_mean)
    return FittedLine(a, b)


def facing_point(li: BevInstance, lj: BevInstance) -> tuple[float, float]:
    """Midpoint between the two instances' nearest facing endpoints.

    The instance with the larger maximum y is the lower one; P is the
    midpoint of (top of lower, bottom of upper). Ties on y break by id, so
    the construction is exactly symmetric in its arguments.
    """
    if li.id == lj.id:
        raise ValueError(f"facing point needs two distinct instances, both have id {li.id}")
    if (li.bottom[1], li.id) > (lj.bottom[1], lj.id):
        lower, upper = li, lj
    else:
        lower, upper = lj, li
    return (
        (lower.top[0] + upper.bottom[0]) / 2.0,
        (lower.top[1] + upper.bottom[1]) / 2.0,
    )


def vote(li: BevInstance, lj: BevInstance) -> float:
    """Pairwise vote: sum of the facing point's perpendicular distances to
    the two instances' fitted lines. Symmetric and non-negative; 0 for
    collinear segments of one divider."""
    px, py = facing_point(li, lj)
    return fit_line(li.points).distance_to(px, py) + fit_line(lj.points).distance_to(px, py)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1


@dataclass
class Clustering:
    """Partition of instance ids into lane dividers. Cluster ids are dense
    0..m-1, ordered by each cluster's smallest member instance id."""

    assignment: dict[int, int]
    num_clusters: int

    def members(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.num_clusters)]
        for inst_id in sorted(self.assignment):
            groups[self.assignment[inst_id]].append(inst_id)
        return groups


def cluster_instances(instances, eta: float) -> Clustering:
    """Merge instances whose pairwise vote is below eta, then take the
    transitive closure: connected components of the thresholded vote graph.
    """
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    instances = sorted(instances, key=lambda inst: inst.id)
    ids = [inst.id for inst in instances]
    if len(set(ids)) != len(ids):
        raise ValueError("instance ids must be unique")
    if not instances:
        return Clustering({}, 0)

    lines = [fit_line(inst.points) for inst in instances]
    uf = _UnionFind(len(instances))
    for i in range(len(instances)):
        for j in range(i + 1, len(instances)):
            px, py = facing_point(instances[i], instances[j])
            pair_vote = lines[i].distance_to(px, py) + lines[j].distance_to(px, py)
            if pair_vote < eta:
                uf.union(i, j)

    root_to_cluster: dict[int, int] = {}
    assignment: dict[int, int] = {}
    for i, inst in enumerate(instances):  # ascending id: clusters numbered by smallest member
        root = uf.find(i)
        if root not in root_to_cluster:
            root_to_cluster[root] = len(root_to_cluster)
        assignment[inst.id] = root_to_cluster[root]
    return Clustering(assignment, len(root_to_cluster))
