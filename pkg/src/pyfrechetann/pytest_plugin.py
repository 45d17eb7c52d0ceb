"""Pytest plugin for pyfrechetann - fixtures and guarantee assertions for curve indexes."""

from collections.abc import Callable
from typing import Any

import numpy as np
import pytest
from _pytest.config import Config

from .ann import NetTree, brute_force_nn, frechet_oracle
from .pipeline import FrechetIndex
from .types import Curve, FrechetConfig, QueryCertificate


def pytest_configure(config: Config) -> None:
    """Register custom markers."""
    config.addinivalue_line("markers", "unit: Fast single-module test")
    config.addinivalue_line("markers", "integration: Test crossing module or process boundaries")
    config.addinivalue_line("markers", "property: Hypothesis property test")
    config.addinivalue_line("markers", "slow: Acceptance-scale suite, deselected by default")


@pytest.fixture
def frechet_config() -> FrechetConfig:
    """
    Frechet tolerances used by a test.
    Override this fixture in your conftest.py to tighten or loosen them.
    """
    return FrechetConfig()


@pytest.fixture
def rng(request: pytest.FixtureRequest) -> np.random.Generator:
    """Random generator seeded from the test name, stable across runs."""
    seed = sum(ord(ch) * (i + 1) for i, ch in enumerate(request.node.name))
    return np.random.default_rng(seed)


def assert_ann_guarantee(index: FrechetIndex, q: Curve) -> QueryCertificate:
    """Query the index and check the answer against a brute-force scan of its originals."""
    answer_id, distance, certificate = index.query(q)
    _, exact = brute_force_nn(index.originals, q, frechet_oracle(index.cfg))
    bound = (1 + index.params.eps) * exact + index.params.slack_budget
    assert distance <= bound, (
        f"{index.params.mode} answer {answer_id} at {distance!r} exceeds "
        f"(1 + {index.params.eps}) * {exact!r} + {index.params.slack_budget!r}"
    )
    return certificate


def assert_metric_triple(
    a: Any, b: Any, c: Any, distance: Callable[[Any, Any], float], tol: float
) -> None:
    """Symmetry within 2 tol and the triangle inequality within 3 tol on a triple."""
    ab, ba = distance(a, b), distance(b, a)
    bc, ac = distance(b, c), distance(a, c)
    assert min(ab, bc, ac) >= 0, "Distances must be non-negative"
    assert abs(ab - ba) <= 2 * tol, f"Asymmetric: d(a,b)={ab!r} d(b,a)={ba!r}"
    assert ac <= ab + bc + 3 * tol, f"Triangle violated: {ac!r} > {ab!r} + {bc!r}"


def assert_tree_audit(tree: NetTree[Any]) -> None:
    """Fail with every violated covering, separation or nesting condition."""
    problems = tree.audit()
    assert not problems, "Net tree audit failed:\n" + "\n".join(problems)
