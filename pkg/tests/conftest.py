"""Minimal pytest configuration and essential fixtures."""

from pathlib import Path

import numpy as np
import pytest

from pyfrechetann.generators import random_walk_curves
from pyfrechetann.io import write_curves
from pyfrechetann.pytest_plugin import frechet_config, rng  # noqa: F401
from pyfrechetann.types import Curve, CurveRecord


@pytest.fixture
def unit_segment():
    """Horizontal unit segment from the origin."""
    return Curve(vertices=[[0.0, 0.0], [1.0, 0.0]])


@pytest.fixture
def shifted_segment():
    """Unit segment one unit above the origin one."""
    return Curve(vertices=[[0.0, 1.0], [1.0, 1.0]])


@pytest.fixture
def make_curves(rng):
    """Factory for seeded random-walk curve sets."""

    def make(n: int, k: int = 4, d: int = 2, vary_k: bool = False) -> list[Curve]:
        return random_walk_curves(rng, n, k, d, vary_k=vary_k)

    return make


@pytest.fixture
def curve_file(tmp_path):
    """Factory writing curves to a curve file and returning its path."""

    def write(name: str, curves: dict[str, Curve]) -> Path:
        path = tmp_path / name
        write_curves(path, [CurveRecord(id=cid, curve=c) for cid, c in curves.items()])
        return path

    return write


def brute_force_discrete(P: Curve, Q: Curve) -> float:
    """Discrete Frechet distance by enumerating every monotone coupling."""
    dist = np.linalg.norm(P.vertices[:, None, :] - Q.vertices[None, :, :], axis=-1)
    n, m = dist.shape
    best = np.inf

    def walk(i: int, j: int, worst: float) -> None:
        nonlocal best
        worst = max(worst, float(dist[i, j]))
        if worst >= best:
            return
        if i == n - 1 and j == m - 1:
            best = worst
            return
        if i + 1 < n:
            walk(i + 1, j, worst)
        if j + 1 < m:
            walk(i, j + 1, worst)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, worst)

    walk(0, 0, 0.0)
    return float(best)


def sampled_curve(P: Curve, pieces: int) -> Curve:
    """P with every edge subdivided into `pieces` equal parts; same point set and order."""
    if P.complexity == 1:
        return P
    rows = [P.vertices[0]]
    for a, b in zip(P.vertices[:-1], P.vertices[1:]):
        for t in np.linspace(0.0, 1.0, pieces + 1)[1:]:
            rows.append(a + t * (b - a))
    return Curve(vertices=np.stack(rows))
