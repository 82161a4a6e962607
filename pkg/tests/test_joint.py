import numpy as np
import pytest

from jointrank.distance import DistanceVector
from jointrank.errors import InvalidInput, NoCommonCases
from jointrank.joint import (align_common_cases, detect_anomalies,
                             joint_density, rank_distances)


def brute_force_ranks(values):
    """Mid-ranks from first principles: sort, average positions of ties."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for pos in range(i, j + 1):
            ranks[order[pos]] = avg
        i = j + 1
    return ranks


def brute_force_kde(ra, rb, h):
    m = len(ra)
    norm = 1.0 / (m * 2 * np.pi * h * h)
    out = np.empty(m)
    for i in range(m):
        total = 0.0
        for j in range(m):
            total += np.exp(-((ra[i] - ra[j]) ** 2 + (rb[i] - rb[j]) ** 2) / (2 * h * h))
        out[i] = norm * total
    return out


def dv(ids, distances):
    return DistanceVector(case_ids=list(ids), distances=np.asarray(distances, float),
                          k_used=1)


class TestAlign:
    def test_intersection(self):
        common, d_a, d_b = align_common_cases(dv(["x", "y"], [1, 2]), dv(["y", "z"], [3, 4]))
        assert common == ["y"]
        assert d_a[0] == 2 and d_b[0] == 3

    def test_identical_sets_order_normalized(self):
        common, d_a, d_b = align_common_cases(dv(["b", "a"], [1, 2]), dv(["a", "b"], [3, 4]))
        assert common == ["a", "b"]
        assert list(d_a) == [2, 1]
        assert list(d_b) == [3, 4]

    def test_disjoint_rejected(self):
        with pytest.raises(NoCommonCases):
            align_common_cases(dv(["x"], [1]), dv(["y"], [2]))


class TestRankDistances:
    def test_simple(self):
        assert list(rank_distances([0.1, 0.5, 0.3]).ranks) == [1, 3, 2]

    def test_midrank_tie(self):
        assert list(rank_distances([2.0, 2.0]).ranks) == [1.5, 1.5]

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(0)
        values = np.round(rng.normal(size=1000), 1)  # plenty of ties
        ranks = rank_distances(values).ranks
        assert list(ranks) == brute_force_ranks(list(values))

    def test_rank_sum_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            values = rng.normal(size=200)
            ranks = rank_distances(values).ranks
            assert abs(ranks.sum() - 200 * 201 / 2) <= 1e-9

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(2)
        values = rng.exponential(size=300)
        a = rank_distances(values).ranks
        b = rank_distances(np.log1p(values) * 7 + 2).ranks
        assert np.array_equal(a, b)

    def test_nan_rejected(self):
        with pytest.raises(InvalidInput):
            rank_distances([1.0, np.nan])


class TestJointDensity:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        m = 200
        ra = rank_distances(rng.normal(size=m)).ranks
        rb = rank_distances(rng.normal(size=m)).ranks
        jrd = joint_density(ra, rb)
        expected = brute_force_kde(ra, rb, jrd.bandwidth)
        assert np.abs(jrd.density - expected).max() <= 1e-12

    def test_grid_matches_brute_force(self):
        rng = np.random.default_rng(4)
        m = 60
        ra = rank_distances(rng.normal(size=m)).ranks
        rb = rank_distances(rng.normal(size=m)).ranks
        jrd = joint_density(ra, rb, grid_size=16)
        g = np.linspace(0.5, m + 0.5, 16)
        h = jrd.bandwidth
        norm = 1.0 / (m * 2 * np.pi * h * h)
        for u in range(0, 16, 5):
            for v in range(0, 16, 5):
                expected = norm * np.exp(
                    -((g[u] - ra) ** 2 + (g[v] - rb) ** 2) / (2 * h * h)
                ).sum()
                assert abs(jrd.grid[u, v] - expected) <= 1e-12

    def test_degenerate_single_point(self):
        jrd = joint_density(np.full(10, 5.5), np.full(10, 5.5))
        assert np.all(jrd.z_score == 0)

    def test_two_symmetric_clusters(self):
        ra = np.array([1.0, 2.0, 99.0, 100.0])
        rb = np.array([1.0, 2.0, 99.0, 100.0])
        jrd = joint_density(ra, rb, bandwidth=2.0)
        assert abs(jrd.z_score[0] - jrd.z_score[3]) <= 1e-9
        assert abs(jrd.z_score[1] - jrd.z_score[2]) <= 1e-9

    def test_z_standardized(self):
        rng = np.random.default_rng(5)
        jrd = joint_density(rng.uniform(1, 500, 500), rng.uniform(1, 500, 500))
        assert abs(jrd.z_score.mean()) <= 1e-9
        assert abs(jrd.z_score.std(ddof=1) - 1.0) <= 1e-9

    def test_validation(self):
        with pytest.raises(InvalidInput):
            joint_density([1.0], [1.0])
        with pytest.raises(InvalidInput):
            joint_density([1.0, 2.0], [1.0, 2.0], grid_size=4)
        with pytest.raises(InvalidInput):
            joint_density([1.0, 2.0], [1.0, 2.0], bandwidth=0.0)


class TestDetect:
    def jrd(self, z, ra=None, rb=None):
        from jointrank.joint import JointRankDensity

        m = len(z)
        z = np.asarray(z, float)
        return JointRankDensity(
            case_ids=[f"m{i}" for i in range(m)],
            rank_a=np.asarray(ra if ra is not None else np.arange(1, m + 1), float),
            rank_b=np.asarray(rb if rb is not None else np.arange(1, m + 1), float),
            density=z.copy(), z_score=z, grid=np.zeros((16, 16)),
            bandwidth=1.0, grid_size=16,
        )

    def test_flags_above_threshold(self):
        report = detect_anomalies(self.jrd([0.0, 3.0, 1.0]), threshold=2.0)
        assert report.flagged_ids == ["m1"]

    def test_empty_report(self):
        report = detect_anomalies(self.jrd([0.0, 1.0]), threshold=2.0)
        assert report.flagged == []

    def test_sorted_by_z_descending(self):
        report = detect_anomalies(self.jrd([2.5, 4.0, 3.0]), threshold=2.0)
        assert report.flagged_ids == ["m1", "m2", "m0"]

    def test_quadrant_filter(self):
        jrd = self.jrd([3.0, 3.0], ra=[1.0, 2.0], rb=[1.0, 2.0])
        report = detect_anomalies(jrd, threshold=2.0, quadrant_filter=0.75)
        assert report.flagged_ids == ["m1"]

    def test_two_sided(self):
        report = detect_anomalies(self.jrd([-3.0, 0.0, 3.0]), threshold=2.0, two_sided=True)
        assert set(report.flagged_ids) == {"m0", "m2"}

    def test_count_monotone_in_threshold(self):
        rng = np.random.default_rng(6)
        jrd = self.jrd(rng.normal(size=200))
        counts = [len(detect_anomalies(jrd, threshold=t).flagged) for t in (0.5, 1.0, 2.0, 3.0)]
        assert counts == sorted(counts, reverse=True)
