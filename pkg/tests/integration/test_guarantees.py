"""Slow acceptance runs of both index modes against brute force."""

from itertools import combinations

import numpy as np
import pytest

from pyfrechetann.ann import brute_force_nn, frechet_oracle
from pyfrechetann.bench import fit_log_linear, run_benchmark
from pyfrechetann.doubling import generate_lower_bound_family, packing_estimate
from pyfrechetann.frechet import discrete_frechet, frechet_distance
from pyfrechetann.generators import lower_bound_curves, random_walk_curves, uniform_point_curves
from pyfrechetann.pipeline import build_additive, build_multiplicative
from pyfrechetann.pytest_plugin import assert_ann_guarantee, assert_metric_triple, assert_tree_audit
from pyfrechetann.snap import snap_curve, snap_mu_bound, validate_snapped
from pyfrechetann.stats import c_packedness_lower_bound, default_packedness_candidates
from pyfrechetann.types import Curve, ExperimentConfig, FrechetConfig, GeneratorConfig

pytestmark = [pytest.mark.integration, pytest.mark.slow]

ABSOLUTE = FrechetConfig(tol_rel=0.0)


def _exact_distances(curves: list[Curve], queries: list[Curve]) -> list[float]:
    oracle = frechet_oracle(FrechetConfig())
    return [brute_force_nn(curves, q, oracle)[1] for q in queries]


@pytest.mark.parametrize("seed", range(20))
def test_multiplicative_random_walks(seed):
    """Every eps answers 50 queries within (1 + eps) of brute force on n = 200."""
    rng = np.random.default_rng([11, seed])
    curves = random_walk_curves(rng, 200, 6, 2, vary_k=True)
    queries = random_walk_curves(rng, 50, 6, 2, vary_k=True)
    exact = _exact_distances(curves, queries)
    delta_min = None
    for eps in (0.25, 0.5, 1.0):
        index = build_multiplicative(curves, eps, delta_min=delta_min)
        delta_min = index.params.stats.delta_min
        assert_tree_audit(index.tree)
        for q, best in zip(queries, exact):
            answer_id, distance, _ = index.query(q)
            assert distance <= (1 + eps) * best + index.params.slack_budget, answer_id


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("eps, eps_add", [(0.25, 0.05), (0.5, 0.5), (0.9, 2.0)])
def test_additive_random_walks(seed, eps, eps_add):
    rng = np.random.default_rng([23, seed])
    curves = random_walk_curves(rng, 200, 6, 2, vary_k=True)
    index = build_additive(curves, eps, eps_add)
    assert_tree_audit(index.tree)
    for q in random_walk_curves(rng, 50, 6, 2, vary_k=True):
        assert_ann_guarantee(index, q)


def test_lower_bound_family_queries():
    """Shifted family members are answered within (1 + eps) of their source."""
    rng = np.random.default_rng(5)
    curves = lower_bound_curves(rng, 120, mu=5, k=9, m=3)
    index = build_multiplicative(curves, 0.5)
    for member in curves[:20]:
        certificate = assert_ann_guarantee(index, member.translate([0.01]))
        assert certificate.distance <= 1.5 * 0.01 + index.params.slack_budget + 1e-6


def test_uniform_points_scale():
    rng = np.random.default_rng(3)
    index = build_multiplicative(uniform_point_curves(rng, 1000, 2), 1.0)
    evaluations = [
        assert_ann_guarantee(index, q).evaluations for q in uniform_point_curves(rng, 50, 2)
    ]
    assert np.mean(evaluations) < 1000


def test_lower_bound_family_fidelity():
    family = generate_lower_bound_family(5, 9, 3)
    assert len(family.members) == 364
    rng = np.random.default_rng(1)
    sample = [family.members[i].curve for i in rng.choice(364, size=40, replace=False)]
    for member in sample:
        assert frechet_distance(family.center, member) == pytest.approx(0.5, abs=1e-6)
    for a, b in combinations(sample, 2):
        assert frechet_distance(a, b) > 0.25


def test_packing_grows_with_mu():
    """log2 of the packing count grows at least 0.8 m times faster than log2 mu.

    Families are capped; the packed fraction of the capped prefix scales the full size.
    """
    mus = [2, 4, 8, 16]
    limit = 300
    logs = []
    for mu in mus:
        family = generate_lower_bound_family(mu, 9, 3, limit=limit)
        curves = [member.curve for member in family.members]
        report = packing_estimate(curves, family.center, 0.5 + 1e-6, 0.25)
        assert report.candidates == len(curves)
        assert report.packing_count == len(curves)
        logs.append(np.log2(report.packing_count / len(curves) * family.total))
    slope = np.polyfit(np.log2(mus), logs, 1)[0]
    assert slope >= 0.8 * 3


@pytest.mark.parametrize("d", [1, 2, 3])
def test_snapping_over_random_curves(d):
    rng = np.random.default_rng([17, d])
    curves = random_walk_curves(rng, 170, 10, d, vary_k=True)
    for eps in (0.01, 0.1, 1.0):
        for curve in curves:
            snapped = snap_curve(curve, eps)
            assert frechet_distance(curve, snapped.curve) <= eps / 2 + 1e-6
            assert validate_snapped(snapped.curve, eps, snap_mu_bound(curve.max_edge_length, eps))


def test_query_evaluations_fit_log_n():
    """Evaluations per query on point curves fit a + b log2 n with R^2 >= 0.9."""
    config = ExperimentConfig(
        sizes=[100, 400, 1600, 6400],
        d=2,
        eps=[0.5],
        queries=100,
        verify=False,
        generator=GeneratorConfig(name="uniform_points"),
    )
    rows = run_benchmark(config)
    evaluations = [row.evaluations_mean for row in rows]
    assert evaluations[-1] < 8 * evaluations[0]
    _, b, r2 = fit_log_linear(config.sizes, evaluations)
    assert b > 0
    assert r2 >= 0.9


def test_metric_sanity_on_random_triples():
    """Symmetry, triangle inequality and d_F <= d_dF + tol on 1000 random triples."""
    rng = np.random.default_rng(29)
    tol = ABSOLUTE.tol_abs

    def distance(a: Curve, b: Curve) -> float:
        return frechet_distance(a, b, ABSOLUTE)

    for _ in range(1000):
        a, b, c = (
            Curve(vertices=rng.uniform(-5, 5, size=(int(rng.integers(1, 5)), 2)))
            for _ in range(3)
        )
        assert_metric_triple(a, b, c, distance, tol + 1e-9)
        assert distance(a, b) <= discrete_frechet(a, b) + tol


def test_packedness_estimate_on_segments():
    """Straight segments never report more than 2 under default candidates."""
    rng = np.random.default_rng(31)
    for _ in range(100):
        ends = rng.uniform(-5, 5, size=(2, 3))
        segment = Curve(vertices=ends)
        fine = Curve(vertices=ends[0] + np.linspace(0, 1, 7)[:, None] * (ends[1] - ends[0]))
        for curve in (segment, fine):
            centers, radii = default_packedness_candidates(curve)
            assert c_packedness_lower_bound(curve, centers, radii) <= 2 + 1e-6
