import numpy as np
import pytest

from lanepost import (
    BevInstance,
    DegenerateGeometryError,
    cluster_instances,
    facing_point,
    fit_line,
    vote,
)
from oracles import line_fit_normal_eq, threshold_graph_components


def vertical(instance_id, x, ys):
    return BevInstance.from_points(instance_id, [(float(x), float(y)) for y in ys])


def random_dash(rng, instance_id):
    base_x = rng.uniform(0.0, 120.0)
    y0 = rng.uniform(0.0, 150.0)
    length = rng.uniform(5.0, 40.0)
    slope = rng.uniform(-0.5, 0.5)
    ys = np.linspace(y0, y0 + length, int(rng.integers(2, 15)))
    xs = base_x + slope * (ys - y0) + rng.normal(0.0, 0.2, len(ys))
    return BevInstance.from_points(instance_id, np.stack([xs, ys], axis=1))


class TestFitLine:
    def test_exact_recovery(self):
        ys = np.array([0.0, 1.0, 2.0, 5.0, 9.0])
        line = fit_line(np.stack([2 * ys + 1, ys], axis=1))
        assert line.a == pytest.approx(2.0, abs=1e-9)
        assert line.b == pytest.approx(1.0, abs=1e-9)
        assert not line.vertical_fallback

    def test_single_point_vertical_fallback(self):
        line = fit_line([(5.0, 7.0)])
        assert (line.a, line.b, line.vertical_fallback) == (0.0, 5.0, True)

    def test_matches_normal_equation_oracle(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            ys = rng.uniform(0.0, 30.0, 20)
            xs = -0.5 * ys + 40.0 + rng.normal(0.0, 0.4, 20)
            line = fit_line(np.stack([xs, ys], axis=1))
            oa, ob = line_fit_normal_eq(list(zip(xs.tolist(), ys.tolist())))
            assert abs(line.a - oa) < 1e-12
            assert abs(line.b - ob) < 1e-12

    def test_horizontal_multi_point_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            fit_line([(0.0, 5.0), (3.0, 5.0), (9.0, 5.0)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            fit_line(np.empty((0, 2)))


class TestFacingPoint:
    def test_stacked_instances(self):
        low = vertical(0, 0.0, (20, 25, 30))
        high = vertical(1, 0.0, (0, 5, 10))
        assert facing_point(low, high) == (0.0, 15.0)

    def test_offset_instances(self):
        low = vertical(0, 0.0, (20, 25, 30))
        high = vertical(1, 4.0, (0, 5, 10))
        assert facing_point(low, high) == (2.0, 15.0)

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(0)
        for i in range(30):
            a = random_dash(rng, 2 * i)
            b = random_dash(rng, 2 * i + 1)
            assert facing_point(a, b) == facing_point(b, a)

    def test_same_id_rejected(self):
        a = vertical(3, 0.0, (0, 5))
        b = vertical(3, 2.0, (10, 15))
        with pytest.raises(ValueError):
            facing_point(a, b)


class TestVote:
    def test_vertical_hand_case(self):
        low = vertical(0, 0.0, (20, 22, 25, 28, 30))
        high = vertical(1, 4.0, (0, 3, 6, 10))
        assert vote(low, high) == pytest.approx(4.0, abs=1e-12)

    def test_collinear_segments_vote_zero(self):
        a = BevInstance.from_points(0, [(y + 3.0, y) for y in (0.0, 2.0, 4.0)])
        b = BevInstance.from_points(1, [(y + 3.0, y) for y in (10.0, 12.0, 14.0)])
        assert vote(a, b) < 1e-9

    def test_symmetric_and_non_negative(self):
        rng = np.random.default_rng(1)
        for i in range(40):
            a = random_dash(rng, 2 * i)
            b = random_dash(rng, 2 * i + 1)
            v = vote(a, b)
            assert v >= 0.0
            assert v == vote(b, a)

    def test_translation_invariance(self):
        rng = np.random.default_rng(2)
        a = random_dash(rng, 0)
        b = random_dash(rng, 1)
        base = vote(a, b)
        for dx, dy in ((13.5, -40.0), (-250.0, 97.25), (1e4, 1e4)):
            at = BevInstance.from_points(0, a.points + (dx, dy))
            bt = BevInstance.from_points(1, b.points + (dx, dy))
            assert vote(at, bt) == pytest.approx(base, abs=1e-9)


class TestClusterInstances:
    def test_single_instance(self):
        clustering = cluster_instances([vertical(0, 5.0, (0, 10))], eta=20.0)
        assert clustering.assignment == {0: 0}
        assert clustering.num_clusters == 1

    def test_dashes_cluster_offset_instance_does_not(self):
        dashes = [
            vertical(0, 100.0, (0, 10, 20, 30)),
            vertical(1, 100.0, (50, 60, 70, 80)),
            vertical(2, 100.0, (100, 110, 120, 130)),
        ]
        offset = vertical(3, 200.0, (40, 60, 80))
        clustering = cluster_instances(dashes + [offset], eta=20.0)
        assert clustering.num_clusters == 2
        assert clustering.assignment == {0: 0, 1: 0, 2: 0, 3: 1}

    def test_chain_merging_is_transitive(self):
        a = vertical(0, 0.0, (0, 5, 10))
        b = vertical(1, 3.0, (20, 25, 30))
        c = vertical(2, 6.0, (40, 45, 50))
        assert vote(a, b) < 5.0 and vote(b, c) < 5.0 and vote(a, c) >= 5.0
        clustering = cluster_instances([a, b, c], eta=5.0)
        assert clustering.num_clusters == 1

    def test_collinear_split_always_merges(self):
        a = BevInstance.from_points(0, [(y + 3.0, y) for y in (0.0, 2.0, 4.0)])
        b = BevInstance.from_points(1, [(y + 3.0, y) for y in (30.0, 32.0, 34.0)])
        for eta in (1e-6, 0.5, 20.0):
            assert cluster_instances([a, b], eta).num_clusters == 1

    def test_matches_graph_oracle(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(1, 11))
            instances = [random_dash(rng, i) for i in range(n)]
            eta = float(rng.uniform(1.0, 30.0))
            clustering = cluster_instances(instances, eta)
            by_id = {inst.id: inst for inst in instances}
            expected = threshold_graph_components(
                list(by_id), lambda i, j: vote(by_id[i], by_id[j]), eta
            )
            assert clustering.assignment == expected, f"seed {seed}"

    def test_permutation_invariance(self):
        rng = np.random.default_rng(9)
        instances = [random_dash(rng, i) for i in range(8)]
        base = cluster_instances(instances, eta=12.0)
        for _ in range(5):
            shuffled = list(instances)
            rng.shuffle(shuffled)
            again = cluster_instances(shuffled, eta=12.0)
            assert again.assignment == base.assignment
            assert again.num_clusters == base.num_clusters

    def test_members_listing(self):
        a = vertical(0, 0.0, (0, 10))
        b = vertical(1, 200.0, (0, 10))
        c = vertical(2, 0.5, (20, 30))
        clustering = cluster_instances([a, b, c], eta=10.0)
        assert clustering.members() == [[0, 2], [1]]

    def test_bad_inputs(self):
        a = vertical(0, 0.0, (0, 10))
        with pytest.raises(ValueError):
            cluster_instances([a], eta=0.0)
        twin = vertical(0, 5.0, (20, 30))
        with pytest.raises(ValueError):
            cluster_instances([a, twin], eta=1.0)
