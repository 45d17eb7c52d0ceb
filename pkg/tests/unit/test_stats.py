"""Unit tests for dataset statistics and the c-packedness estimator."""

import math

import numpy as np
import pytest

from pyfrechetann.errors import ConstraintError, DegenerateDatasetError
from pyfrechetann.frechet import frechet_distance
from pyfrechetann.generators import random_walk_curves
from pyfrechetann.geometry import point_segment_distances
from pyfrechetann.stats import (
    bundledness_spread_ratio,
    c_packedness_lower_bound,
    clipped_lengths,
    dataset_stats,
    default_packedness_candidates,
    distinct_curves,
    lambda_max,
    min_pairwise_frechet,
    min_point_gap,
    spread,
)
from pyfrechetann.types import Curve, FrechetConfig

pytestmark = pytest.mark.unit

ABSOLUTE = FrechetConfig(tol_rel=0.0)


def sampled_length_inside(P: Curve, center: np.ndarray, radius: float, pieces: int = 200) -> float:
    """Length of the pieces of P touching the ball; never below the exact clipped length."""
    total = 0.0
    for a, b in zip(P.vertices[:-1], P.vertices[1:]):
        knots = a + np.linspace(0.0, 1.0, pieces + 1)[:, None] * (b - a)
        gaps = point_segment_distances(center[None, :], knots[:-1], knots[1:])[0]
        total += float(np.count_nonzero(gaps <= radius)) * float(np.linalg.norm(b - a)) / pieces
    return total


class TestDatasetStats:
    """Test dataset_stats on small hand-checked sets."""

    def test_parallel_segments(self, unit_segment):
        """Test two parallel unit segments two units apart."""
        upper = unit_segment.translate([0.0, 2.0])
        stats = dataset_stats([unit_segment, upper])
        assert stats.lambda_max == 1.0
        assert stats.delta_min == 2.0
        assert stats.bundledness == 2.0
        assert stats.spread == pytest.approx(math.sqrt(5))
        assert stats.n == 2
        assert stats.k_max == 2
        assert stats.delta_min_exact
        assert bundledness_spread_ratio(stats) == pytest.approx(0.5 / math.sqrt(5))

    def test_duplicates_count_once(self, unit_segment, shifted_segment):
        """Test canonical duplicates do not make delta_min zero."""
        subdivided = Curve(vertices=[[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]])
        stats = dataset_stats([unit_segment, subdivided, shifted_segment])
        assert stats.n == 2
        assert stats.delta_min == 1.0

    def test_delta_min_override(self, unit_segment, shifted_segment):
        """Test a supplied delta_min skips the pairwise search."""
        stats = dataset_stats([unit_segment, shifted_segment], delta_min=0.25)
        assert stats.delta_min == 0.25
        assert not stats.delta_min_exact
        with pytest.raises(ConstraintError):
            dataset_stats([unit_segment, shifted_segment], delta_min=0.0)

    def test_single_curve_is_degenerate(self, unit_segment):
        """Test delta_min is undefined for one distinct curve."""
        with pytest.raises(DegenerateDatasetError, match="at least 2"):
            dataset_stats([unit_segment, unit_segment])

    def test_point_curves_are_degenerate(self):
        """Test a set without edges has no bundledness."""
        with pytest.raises(DegenerateDatasetError, match="length 0"):
            dataset_stats([Curve(vertices=[[0.0]]), Curve(vertices=[[1.0]])])


class TestPairwise:
    """Test the minimum pairwise Frechet search."""

    def test_finds_closest_pair(self, unit_segment):
        """Test three translates of a segment."""
        curves = [unit_segment.translate([0.0, y]) for y in (0.0, 5.0, 1.0)]
        best, pair = min_pairwise_frechet(curves)
        assert best == 1.0
        assert pair == (0, 2)

    def test_matches_exhaustive(self, make_curves):
        """Test against all pairs."""
        curves = make_curves(8, k=3)
        best, (i, j) = min_pairwise_frechet(curves)
        exhaustive = min(
            frechet_distance(curves[a], curves[b])
            for a in range(len(curves))
            for b in range(a + 1, len(curves))
        )
        assert best == pytest.approx(exhaustive, abs=1e-6)
        assert frechet_distance(curves[i], curves[j]) == best

    def test_needs_two_curves(self, unit_segment):
        """Test the search rejects a single curve."""
        with pytest.raises(DegenerateDatasetError):
            min_pairwise_frechet([unit_segment])

    def test_point_gap_across_blocks(self, rng):
        """Test the blockwise point gap against all pairs, with the closest pair far apart."""
        points = rng.uniform(0.0, 100.0, size=(600, 2))
        points[590] = points[3] + [1e-4, 0.0]
        expected = min(
            float(np.linalg.norm(points[i] - points[j]))
            for i in range(len(points))
            for j in range(i + 1, len(points))
        )
        assert min_point_gap(points) == pytest.approx(expected)
        assert min_point_gap(points) <= 1e-4 + 1e-12
        with pytest.raises(DegenerateDatasetError):
            min_point_gap(points[:1])


class TestSpreadAndEdges:
    """Test spread and edge statistics."""

    def test_lambda_max(self):
        """Test the largest edge across curves."""
        curves = [Curve(vertices=[0.0, 1.0, 4.0]), Curve(vertices=[0.0, 2.0])]
        assert lambda_max(curves) == 3.0
        assert lambda_max([Curve(vertices=[[0.0]])]) == 0.0

    def test_spread_single_point(self):
        """Test spread without non-zero distances is 1."""
        assert spread([Curve(vertices=[[1.0, 1.0]])]) == 1.0

    def test_spread_points(self):
        """Test spread of three collinear points."""
        curves = [Curve(vertices=[[x]]) for x in (0.0, 1.0, 4.0)]
        assert spread(curves) == pytest.approx(4.0)

    def test_distinct_curves_sorted(self):
        """Test canonical dedup and ordering."""
        curves = [
            Curve(vertices=[2.0, 3.0]),
            Curve(vertices=[0.0, 1.0]),
            Curve(vertices=[2.0, 3.0]),
        ]
        assert [c.vertices[0, 0] for c in distinct_curves(curves)] == [0.0, 2.0]


class TestPackedness:
    """Test the c-packedness lower bound."""

    def test_clipped_lengths(self):
        """Test arc length inside balls centred on a straight curve."""
        curve = Curve(vertices=[[0.0, 0.0], [10.0, 0.0]])
        lengths = clipped_lengths(curve, np.array([[5.0, 0.0], [0.0, 0.0], [5.0, 5.0]]), 2.0)
        assert lengths[0] == pytest.approx(4.0)
        assert lengths[1] == pytest.approx(2.0)
        assert lengths[2] == 0.0

    def test_segment_at_most_two(self):
        """Test a straight segment is 2-packed at any centre."""
        curve = Curve(vertices=[[0.0, 0.0], [10.0, 0.0]])
        centers = np.array([[5.0, 0.0], [0.0, 0.0], [3.0, 1.0]])
        value = c_packedness_lower_bound(curve, centers, [0.5, 1.0, 5.0, 20.0])
        assert value == pytest.approx(2.0)
        assert value <= 2.0 + 1e-6

    def test_default_candidates_on_segment(self):
        """Test vertex centres on a segment give ratio 1."""
        curve = Curve(vertices=[[0.0, 0.0], [10.0, 0.0]])
        centers, radii = default_packedness_candidates(curve)
        assert c_packedness_lower_bound(curve, centers, radii) == pytest.approx(1.0)

    def test_default_radii_refined(self):
        """Test consecutive default radii differ by at most a factor of 2."""
        curve = Curve(vertices=[[0.0], [0.1], [50.0]])
        _, radii = default_packedness_candidates(curve)
        assert radii[0] == pytest.approx(0.1)
        assert np.all(radii[1:] / radii[:-1] <= 2.0 + 1e-12)
        assert radii[-1] == pytest.approx(50.0)

    def test_zigzag_is_heavily_packed(self):
        """Test a dense zig-zag inside a small ball scores high."""
        zigzag = Curve(vertices=[[0.0, float(i % 2)] for i in range(21)])
        centers, radii = default_packedness_candidates(zigzag)
        assert c_packedness_lower_bound(zigzag, centers, radii) >= 10.0

    def test_invalid_candidates(self, unit_segment):
        """Test empty candidate sets and non-positive radii are rejected."""
        with pytest.raises(ConstraintError):
            c_packedness_lower_bound(unit_segment, np.empty((0, 2)), [1.0])
        with pytest.raises(ConstraintError):
            c_packedness_lower_bound(unit_segment, [[0.0, 0.0]], [])
        with pytest.raises(ConstraintError):
            c_packedness_lower_bound(unit_segment, [[0.0, 0.0]], [0.0])

    def test_estimate_below_sampling_oracle(self, rng):
        """Test the estimate never exceeds a fine-sampling overestimate on 100 curves."""
        for P in random_walk_curves(rng, 100, 5, 2):
            centers, radii = default_packedness_candidates(P)
            estimate = c_packedness_lower_bound(P, centers, radii)
            oracle = max(sampled_length_inside(P, c, r) / r for c in centers for r in radii)
            assert estimate <= oracle + 1e-6

    def test_default_candidates_within_factor_two(self, rng):
        """Test default radii reach half the best ratio over vertex-centred balls."""
        for P in random_walk_curves(rng, 30, 6, 2):
            centers, radii = default_packedness_candidates(P)
            estimate = c_packedness_lower_bound(P, centers, radii)
            fine = np.geomspace(radii[0], 4.0 * radii[-1], 400)
            best = c_packedness_lower_bound(P, centers, fine)
            assert estimate >= 0.5 * best - 1e-9
            assert estimate <= best + 1e-9


class TestInvariance:
    """Test dataset statistics under translation and scaling."""

    def test_translation(self, make_curves, rng):
        """Test a common translation keeps bundledness and spread."""
        curves = make_curves(12, k=4)
        base = dataset_stats(curves, ABSOLUTE)
        for offset in rng.uniform(-50, 50, size=(3, 2)):
            moved = dataset_stats([c.translate(offset) for c in curves], ABSOLUTE)
            assert moved.spread == pytest.approx(base.spread, rel=1e-9)
            slack = 3 * ABSOLUTE.tol_abs / base.lambda_max
            assert moved.bundledness == pytest.approx(base.bundledness, abs=slack)

    @pytest.mark.parametrize("factor", [0.1, 10.0])
    def test_scaling(self, make_curves, factor):
        """Test a common scaling keeps bundledness and spread."""
        curves = make_curves(12, k=4)
        base = dataset_stats(curves, ABSOLUTE)
        scaled = dataset_stats([c.scale(factor) for c in curves], ABSOLUTE)
        assert scaled.lambda_max == pytest.approx(factor * base.lambda_max)
        assert scaled.spread == pytest.approx(base.spread, rel=1e-9)
        slack = (2 + 1 / factor) * ABSOLUTE.tol_abs / base.lambda_max
        assert scaled.bundledness == pytest.approx(base.bundledness, abs=slack)

    def test_delta_min_below_sampled_pairs(self, make_curves, rng):
        """Test delta_min lower-bounds the distance of sampled pairs."""
        curves = make_curves(20, k=4)
        stats = dataset_stats(curves, ABSOLUTE)
        for _ in range(40):
            i, j = rng.choice(len(curves), size=2, replace=False)
            assert stats.delta_min <= frechet_distance(curves[i], curves[j], ABSOLUTE) + 1e-9
