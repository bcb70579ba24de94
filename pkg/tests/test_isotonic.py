import numpy as np
import pytest

from otreg import WeightedPoint, merge_ties, pava

from conftest import dp_isotonic_cost


def points(*triples):
    return [WeightedPoint(x, y, w) for x, y, w in triples]


class TestWeightedPoint:
    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            WeightedPoint(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            WeightedPoint(0.0, 0.0, -1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            WeightedPoint(np.nan, 0.0, 1.0)
        with pytest.raises(ValueError):
            WeightedPoint(0.0, np.inf, 1.0)


class TestMergeTies:
    def test_empty(self):
        assert merge_ties([]) == []

    def test_single_group(self):
        out = merge_ties(points((0, 0, 1), (0, 1, 1)))
        assert len(out) == 1
        assert out[0].x == 0.0
        assert out[0].y == 0.5
        assert out[0].w == 2.0

    def test_weighted_mean(self):
        out = merge_ties(points((1, 2, 1), (1, 0, 3)))
        assert out == [WeightedPoint(1.0, 0.5, 4.0)]

    def test_sorts_and_groups(self):
        out = merge_ties(points((2, 5, 1), (0, 1, 1), (2, 7, 1)))
        assert [p.x for p in out] == [0.0, 2.0]
        assert out[1].y == 6.0
        assert out[1].w == 2.0

    def test_mass_and_first_moment_preserved(self):
        rng = np.random.default_rng(61)
        for _ in range(30):
            n = rng.integers(1, 40)
            xs = rng.choice(np.linspace(0, 1, 7), size=n)
            ys = rng.normal(size=n)
            ws = rng.uniform(0.1, 2.0, size=n)
            pts = points(*zip(xs, ys, ws))
            out = merge_ties(pts)
            assert abs(sum(p.w for p in out) - ws.sum()) < 1e-12
            assert abs(sum(p.w * p.y for p in out) - (ws * ys).sum()) < 1e-9
            assert all(b.x > a.x for a, b in zip(out, out[1:]))


def pava_arrays(ys, ws):
    pts = points(*[(i, y, w) for i, (y, w) in enumerate(zip(ys, ws))])
    return np.array(pava(pts))


class TestPava:
    def test_already_isotonic_unchanged(self):
        out = pava(points((0, 0.0, 1), (1, 0.5, 1)))
        assert out == [0.0, 0.5]

    def test_two_point_violation(self):
        out = pava(points((0, 1.0, 1), (1, 0.0, 3)))
        assert out == [0.25, 0.25]

    def test_three_point_partial_merge(self):
        out = pava(points((0, 0.0, 1), (1, 2.0, 1), (2, 1.0, 1)))
        assert out == [0.0, 1.5, 1.5]

    def test_requires_strictly_increasing_x(self):
        with pytest.raises(ValueError):
            pava(points((0, 0.0, 1), (0, 1.0, 1)))
        with pytest.raises(ValueError):
            pava(points((1, 0.0, 1), (0, 1.0, 1)))
        with pytest.raises(ValueError):
            pava([])

    def test_output_nondecreasing(self):
        rng = np.random.default_rng(67)
        for _ in range(100):
            n = int(rng.integers(1, 60))
            fit = pava_arrays(rng.normal(size=n), rng.uniform(0.1, 3.0, size=n))
            assert np.all(np.diff(fit) >= 0.0)

    def test_weighted_mean_preserved(self):
        rng = np.random.default_rng(71)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            ys = rng.normal(size=n)
            ws = rng.uniform(0.1, 3.0, size=n)
            fit = pava_arrays(ys, ws)
            assert abs(np.sum(ws * fit) - np.sum(ws * ys)) < 1e-9

    def test_idempotent(self):
        rng = np.random.default_rng(73)
        for _ in range(30):
            n = int(rng.integers(1, 40))
            ws = rng.uniform(0.1, 3.0, size=n)
            fit = pava_arrays(rng.normal(size=n), ws)
            np.testing.assert_array_equal(pava_arrays(fit, ws), fit)

    def test_beats_random_monotone_candidates(self):
        rng = np.random.default_rng(79)
        for _ in range(30):
            n = int(rng.integers(2, 20))
            ys = rng.normal(size=n)
            ws = rng.uniform(0.1, 3.0, size=n)
            fit = pava_arrays(ys, ws)
            best = float(np.sum(ws * (fit - ys) ** 2))
            for _ in range(50):
                cand = np.sort(rng.normal(size=n))
                cost = float(np.sum(ws * (cand - ys) ** 2))
                assert best <= cost + 1e-12

    def test_matches_exact_dp_oracle(self):
        rng = np.random.default_rng(83)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            ys = rng.normal(size=n)
            ws = rng.uniform(0.1, 3.0, size=n)
            fit = pava_arrays(ys, ws)
            cost = float(np.sum(ws * (fit - ys) ** 2))
            assert abs(cost - dp_isotonic_cost(ys, ws)) < 1e-6
