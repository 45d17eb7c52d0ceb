"""Seeded random curve sets for benchmarks and tests."""

from __future__ import annotations

import numpy as np

from .doubling import generate_lower_bound_family
from .errors import ConstraintError
from .types import Curve, GeneratorConfig


def random_walk_curves(
    rng: np.random.Generator,
    n: int,
    k: int,
    d: int,
    step: float = 1.0,
    extent: float = 10.0,
    vary_k: bool = False,
) -> list[Curve]:
    """
    n curves of complexity k (or uniform in [2, k] with vary_k) in R^d: a uniform start in
    [0, extent]^d followed by Gaussian steps of scale `step`.
    """
    if n < 0 or k < 1 or d < 1:
        raise ConstraintError(f"Invalid generator sizes n={n} k={k} d={d}")
    curves = []
    for _ in range(n):
        size = int(rng.integers(min(2, k), k + 1)) if vary_k else k
        start = rng.uniform(0.0, extent, size=d)
        steps = rng.normal(0.0, step, size=(size - 1, d))
        curves.append(Curve(vertices=np.vstack([start, start + np.cumsum(steps, axis=0)])))
    return curves


def uniform_point_curves(
    rng: np.random.Generator, n: int, d: int, extent: float = 1.0
) -> list[Curve]:
    """n singleton curves uniform in [0, extent]^d; their Frechet space is R^d itself."""
    if n < 0 or d < 1:
        raise ConstraintError(f"Invalid generator sizes n={n} d={d}")
    points = rng.uniform(0.0, extent, size=(n, d))
    return [Curve(vertices=p[None, :]) for p in points]


def lower_bound_curves(rng: np.random.Generator, n: int, mu: int, k: int, m: int) -> list[Curve]:
    """Up to n random members of the zig-zag family, in generation order."""
    family = generate_lower_bound_family(mu, k, m)
    members = [member.curve for member in family.members]
    if n >= len(members):
        return members
    chosen = np.sort(rng.choice(len(members), size=n, replace=False))
    return [members[i] for i in chosen.tolist()]


def generate(
    config: GeneratorConfig, rng: np.random.Generator, n: int, k: int, d: int
) -> list[Curve]:
    """Dispatch on config.name with config.params as keyword overrides."""
    params = dict(config.params)
    if config.name == "random_walk":
        return random_walk_curves(
            rng,
            n,
            k,
            d,
            step=params.get("step", 1.0),
            extent=params.get("extent", 10.0),
            vary_k=bool(params.get("vary_k", 0)),
        )
    if config.name == "uniform_points":
        return uniform_point_curves(rng, n, d, extent=params.get("extent", 1.0))
    return lower_bound_curves(
        rng, n, mu=int(params.get("mu", 5)), k=k, m=int(params.get("m", k // 3))
    )
