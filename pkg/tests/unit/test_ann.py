"""Unit tests for the net tree and the nearly-doubling wrapper over abstract metrics."""

from itertools import combinations
from unittest.mock import patch

import numpy as np
import pytest

from pyfrechetann.ann import (
    MetricOracle,
    NearlyDoublingProjection,
    NetTree,
    ann_query,
    brute_force_nn,
    build_generalized_ann,
    build_net_tree,
    euclidean_oracle,
    frechet_oracle,
    generic_nearly_doubling_ann,
    min_pairwise_distance,
)
from pyfrechetann.config import parallel_map
from pyfrechetann.errors import ConstraintError, DegenerateDatasetError, NetTreeError
from pyfrechetann.pytest_plugin import assert_tree_audit

pytestmark = pytest.mark.unit


def _points(rng, n, d=2, scale=10.0):
    return [p for p in rng.uniform(0.0, scale, size=(n, d))]


class TestMetricOracle:
    """Test evaluation counting and validation."""

    def test_counts_and_resets(self):
        """Test every call is counted."""
        oracle = euclidean_oracle()
        oracle(np.zeros(2), np.ones(2))
        oracle(np.zeros(2), np.zeros(2))
        assert oracle.evaluations == 2
        oracle.reset()
        assert oracle.evaluations == 0

    def test_invalid_distance(self):
        """Test NaN and negative distances are rejected."""
        with pytest.raises(NetTreeError):
            MetricOracle(lambda a, b: float("nan"))(0, 1)
        with pytest.raises(NetTreeError):
            MetricOracle(lambda a, b: -1.0)(0, 1)

    def test_negative_tolerance(self):
        """Test the tolerance must be non-negative."""
        with pytest.raises(ConstraintError):
            MetricOracle(lambda a, b: 0.0, tolerance=-1.0)

    def test_frechet_oracle_tolerance(self, frechet_config, unit_segment, shifted_segment):
        """Test the Frechet oracle carries the bisection tolerance."""
        oracle = frechet_oracle(frechet_config)
        assert oracle.tolerance == frechet_config.tol_abs
        assert oracle(unit_segment, shifted_segment) == 1.0


class TestNetTree:
    """Test construction invariants."""

    def test_audit_clean(self, rng):
        """Test covering, separation and nesting hold after random inserts."""
        tree, reps = build_net_tree(_points(rng, 60), euclidean_oracle())
        assert reps == list(range(60))
        assert_tree_audit(tree)

    def test_audit_clean_clustered(self, rng):
        """Test a multi-scale point set."""
        centres = rng.uniform(0, 100, size=(5, 2))
        points = [c + rng.normal(0, s, size=2) for c in centres for s in (0.01, 0.1, 1.0)]
        tree, _ = build_net_tree(points, euclidean_oracle(), audit=True)
        assert len(tree) == 15
        assert tree.min_level < tree.root_level

    def test_other_base(self, rng):
        """Test a base other than 2."""
        tree, _ = build_net_tree(_points(rng, 40), euclidean_oracle(), base=3.0)
        assert_tree_audit(tree)

    def test_duplicates(self):
        """Test duplicates raise or merge."""
        points = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 0.0])]
        with pytest.raises(NetTreeError, match="duplicates"):
            build_net_tree(points, euclidean_oracle())
        tree, reps = build_net_tree(points, euclidean_oracle(), on_duplicate="merge")
        assert len(tree) == 2
        assert reps == [0, 1, 0]

    def test_invalid_base(self):
        """Test the base must exceed 1."""
        with pytest.raises(ConstraintError):
            NetTree(euclidean_oracle(), base=1.0)

    def test_topology_round_trip(self, rng):
        """Test a tree rebuilt from its topology answers identically without evaluations."""
        points = _points(rng, 40)
        tree, _ = build_net_tree(points, euclidean_oracle())
        oracle = euclidean_oracle()
        rebuilt = NetTree.from_topology(points, tree.topology(), oracle)
        assert oracle.evaluations == 0
        assert rebuilt.root_level == tree.root_level
        assert rebuilt.min_level == tree.min_level
        for q in _points(rng, 10):
            assert ann_query(rebuilt, q, 0.1) == ann_query(tree, q, 0.1)

    def test_topology_rejects_bad_parent(self):
        """Test inconsistent topologies are rejected."""
        points = [np.zeros(1), np.ones(1)]
        with pytest.raises(NetTreeError):
            NetTree.from_topology(points, [(0, None), (-1, 5)], euclidean_oracle())
        with pytest.raises(NetTreeError):
            NetTree.from_topology(points, [(0, None)], euclidean_oracle())


class TestAnnQuery:
    """Test approximate nearest-neighbour queries."""

    @pytest.mark.parametrize("eps", [0.05, 0.5, 1.0, 3.0])
    def test_guarantee(self, rng, eps):
        """Test answers are within (1 + eps) of the exact nearest neighbour."""
        points = _points(rng, 200)
        oracle = euclidean_oracle()
        tree, _ = build_net_tree(points, oracle)
        for q in _points(rng, 50, scale=12.0):
            _, distance = ann_query(tree, q, eps)
            _, exact = brute_force_nn(points, q, oracle)
            assert distance <= (1 + eps) * exact + 2 * oracle.tolerance

    def test_exact_hit(self, rng):
        """Test querying an indexed item returns it."""
        points = _points(rng, 50)
        tree, _ = build_net_tree(points, euclidean_oracle())
        index, distance = ann_query(tree, points[17], 0.5)
        assert index == 17
        assert distance == 0.0

    def test_sublinear_evaluations(self, rng):
        """Test a query evaluates far fewer distances than a scan."""
        points = _points(rng, 2000, d=1, scale=2000.0)
        tree, _ = build_net_tree(points, euclidean_oracle())
        counter = euclidean_oracle()
        ann_query(tree, np.array([1000.3]), 0.5, counter)
        assert counter.evaluations < 600

    def test_empty_tree_and_bad_eps(self, rng):
        """Test preconditions."""
        with pytest.raises(ConstraintError):
            ann_query(NetTree(euclidean_oracle()), np.zeros(2), 0.5)
        tree, _ = build_net_tree(_points(rng, 3), euclidean_oracle())
        with pytest.raises(ConstraintError):
            ann_query(tree, np.zeros(2), 0.0)

    def test_brute_force_ties(self):
        """Test ties resolve to the lowest index."""
        points = [np.array([1.0]), np.array([-1.0]), np.array([1.0])]
        assert brute_force_nn(points, np.array([0.0]), euclidean_oracle()) == (0, 1.0)
        with pytest.raises(ConstraintError):
            brute_force_nn([], np.array([0.0]), euclidean_oracle())


def _rounding(bound=0.5):
    return NearlyDoublingProjection(project=np.round, bound=bound, name="round")


class TestNearlyDoubling:
    """Test the projection wrapper and the generalized construction."""

    def test_collisions_share_representative(self):
        """Test items projecting onto the same point share the earliest representative."""
        items = [np.array([0.1]), np.array([0.2]), np.array([3.0])]
        index = generic_nearly_doubling_ann(items, _rounding(), euclidean_oracle(), 0.5)
        assert index.collisions == {0: [1]}
        assert index.inverse == [0, 2]
        original, distance = index.query(np.array([0.15]))
        assert original == 0
        assert distance == pytest.approx(0.05)

    def test_guarantee_with_projection(self, rng):
        """Test answers within (1 + eps) d + (2 + eps) bound."""
        items = _points(rng, 100)
        oracle = euclidean_oracle()
        eps = 0.5
        index = generic_nearly_doubling_ann(items, _rounding(0.75), oracle, eps)
        for q in _points(rng, 30):
            _, distance = index(q)
            _, exact = brute_force_nn(items, q, oracle)
            assert distance <= (1 + eps) * exact + (2 + eps) * 0.75 + 3 * oracle.tolerance

    def test_bound_verified(self):
        """Test a projection exceeding its declared bound is rejected."""
        shift = NearlyDoublingProjection(project=lambda x: x + 1.0, bound=0.1)
        with pytest.raises(ConstraintError, match="bound"):
            generic_nearly_doubling_ann([np.zeros(1)], shift, euclidean_oracle(), 0.5)

    def test_identity(self, rng):
        """Test the identity projection indexes items directly."""
        items = _points(rng, 20)
        index = generic_nearly_doubling_ann(
            items, NearlyDoublingProjection.identity(), euclidean_oracle(), 0.5
        )
        assert index.inverse == list(range(20))
        assert index.collisions == {}

    def test_generalized_is_multiplicative(self, rng):
        """Test the generalized build gives a pure (1 + eps) guarantee."""
        items = _points(rng, 80)
        oracle = euclidean_oracle()

        def grid(extent):
            cell = extent / 3
            return NearlyDoublingProjection(
                project=lambda x: np.round(x / cell) * cell, bound=cell * np.sqrt(2) / 2
            )

        eps = 0.5
        index = build_generalized_ann(items, grid, oracle, eps)
        assert index.eps == eps / 4
        for q in _points(rng, 30):
            _, distance = index(q)
            _, exact = brute_force_nn(items, q, oracle)
            assert distance <= (1 + eps) * exact + 6 * oracle.tolerance

    def test_generalized_rejects_duplicates(self):
        """Test unseparated items have no multiplicative index."""
        items = [np.zeros(1), np.zeros(1), np.ones(1)]
        with pytest.raises(DegenerateDatasetError):
            build_generalized_ann(items, lambda e: _rounding(), euclidean_oracle(), 0.5)
        with pytest.raises(ConstraintError):
            build_generalized_ann(items[1:], lambda e: _rounding(), euclidean_oracle(), 1.5)

    def test_min_pairwise_distance(self):
        """Test exhaustive minimum."""
        items = [np.array([0.0]), np.array([5.0]), np.array([1.5])]
        assert min_pairwise_distance(items, euclidean_oracle()) == 1.5
        with pytest.raises(DegenerateDatasetError):
            min_pairwise_distance(items[:1], euclidean_oracle())

    def test_min_pairwise_distance_in_batches(self, rng):
        """Test pairs are evaluated in bounded batches with the exhaustive result."""
        items = _points(rng, 30)
        expected = min(float(np.linalg.norm(a - b)) for a, b in combinations(items, 2))
        with patch("pyfrechetann.ann.parallel_map", wraps=parallel_map) as mapped:
            assert min_pairwise_distance(items, euclidean_oracle(), batch=50) == pytest.approx(
                expected
            )
        sizes = [len(call.args[1]) for call in mapped.call_args_list]
        assert sum(sizes) == 30 * 29 // 2
        assert max(sizes) <= 50
        with pytest.raises(ConstraintError):
            min_pairwise_distance(items, euclidean_oracle(), batch=0)
