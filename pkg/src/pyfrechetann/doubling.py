"""
Empirical doubling estimation for curve sets.

Provides the zig-zag family of (mu, 1)-curves around a straight center curve, a greedy
packing estimate inside Frechet balls, and the capacity formulas bounding the doubling
dimension of (mu, eps)-curves.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from itertools import combinations, islice

import numpy as np

from .config import parallel_map
from .errors import ConstraintError
from .frechet import frechet_decide
from .snap import validate_snapped
from .types import Curve, FamilyMember, FrechetConfig, LowerBoundFamily, PackingReport

logger = logging.getLogger(__name__)


def lower_bound_center(mu: int, k: int, m: int) -> Curve:
    """Straight 1-d curve 0, mu, 2 mu, ..., (k - 2m) mu."""
    _check_family_params(mu, k, m)
    return Curve(vertices=np.arange(k - 2 * m + 1, dtype=np.float64) * mu)


def lower_bound_member(indices: Sequence[int], mu: int, k: int, m: int) -> Curve:
    """
    Zig-zag curve for the cut positions n_1 < ... < n_m.

    The center is cut into pieces [0, n_1 + 1], [n_i, n_{i+1} + 1], ..., [n_m, end]; each
    piece keeps the center vertices strictly inside it and the pieces are concatenated,
    so every cut inserts a leftward unit step n_i + 1 -> n_i.
    """
    _check_family_params(mu, k, m)
    end = (k - 2 * m) * mu
    if len(indices) != m:
        raise ConstraintError(f"Expected {m} cut indices, got {len(indices)}")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ConstraintError(f"Cut indices must be strictly increasing: {tuple(indices)}")
    if indices and not (0 <= indices[0] and indices[-1] <= end - 2):
        raise ConstraintError(f"Cut indices must lie in [0, {end - 2}]: {tuple(indices)}")

    bounds = [(0, indices[0] + 1)] if indices else [(0, end)]
    for a, b in zip(indices, indices[1:]):
        bounds.append((a, b + 1))
    if indices:
        bounds.append((indices[-1], end))

    vertices: list[int] = []
    for start, stop in bounds:
        vertices.append(start)
        vertices.extend(c for c in range(0, end + 1, mu) if start < c < stop)
        vertices.append(stop)
    return Curve(vertices=np.asarray(vertices, dtype=np.float64))


def _check_family_params(mu: int, k: int, m: int) -> None:
    if mu <= 1:
        raise ConstraintError(f"mu must be > 1, got {mu}")
    if m < 0:
        raise ConstraintError(f"m must be non-negative, got {m}")
    if k - 2 * m < 1:
        raise ConstraintError(f"k - 2m must be at least 1, got k={k}, m={m}")


def generate_lower_bound_family(
    mu: int, k: int, m: int, limit: int | None = None
) -> LowerBoundFamily:
    """
    Generate the center curve C and one member per strictly increasing index tuple drawn
    from {0, ..., (k - 2m) mu - 2}; there are C((k - 2m) mu - 1, m) such tuples.

    Every member is a (mu, 1)-curve with at most k edges at Frechet distance 1/2 from C,
    and any two members are more than 1/4 apart. Members come in lexicographic order of
    their tuples; `limit` caps how many are built.

    Raises:
        ConstraintError: If mu <= 1, m < 0, k - 2m < 1 or limit < 0
    """
    center = lower_bound_center(mu, k, m)
    if limit is not None and limit < 0:
        raise ConstraintError(f"limit must be non-negative, got {limit}")
    domain = (k - 2 * m) * mu - 1
    total = math.comb(domain, m)

    members: list[FamilyMember] = []
    skipped = 0
    for indices in islice(combinations(range(domain), m), limit):
        curve = lower_bound_member(indices, mu, k, m)
        # complexity is measured in edges, matching the center's k - 2m
        if curve.complexity - 1 > k or not validate_snapped(curve, 1.0, mu):
            skipped += 1
            logger.warning(
                "Skipping family tuple %s: not a (%d, 1)-curve with <= %d edges", indices, mu, k
            )
            continue
        members.append(FamilyMember(indices=indices, curve=curve))

    logger.debug(
        "lower-bound family mu=%d k=%d m=%d: %d of %d tuples built", mu, k, m, len(members), total
    )
    return LowerBoundFamily(
        mu=mu, k=k, m=m, center=center, members=members, skipped=skipped, total=total
    )


def packing_estimate(
    S: Sequence[Curve],
    center: Curve,
    r: float,
    sep: float,
    cfg: FrechetConfig | None = None,
    seed: int | None = None,
) -> PackingReport:
    """
    Greedy sep-separated subset of the Frechet ball B_r(center) intersected with S.

    A curve is inside the ball when d_F(center, s) <= r + tau and is kept when its distance
    to every kept curve exceeds sep - tau. Candidates are scanned in input order, or in a
    seeded random order. The count lower-bounds the number of sep-balls covering the ball.

    Raises:
        ConstraintError: Unless r > 0 and 0 < sep <= r
    """
    if not r > 0:
        raise ConstraintError(f"r must be positive, got {r}")
    if not 0 < sep <= r:
        raise ConstraintError(f"sep must lie in (0, r], got {sep}")
    cfg = FrechetConfig() if cfg is None else cfg
    tau = cfg.tol_abs

    order = list(range(len(S)))
    if seed is not None:
        order = np.random.default_rng(seed).permutation(len(S)).tolist()

    inside_flags = parallel_map(lambda s: frechet_decide(center, s, r + tau, cfg), S)
    inside = [S[i] for i in order if inside_flags[i]]

    threshold = max(0.0, sep - tau)
    kept: list[Curve] = []
    for candidate in inside:
        if not any(frechet_decide(other, candidate, threshold, cfg) for other in kept):
            kept.append(candidate)

    count = len(kept)
    logger.debug("packing estimate: %d of %d inside, %d kept", len(inside), len(S), count)
    return PackingReport(
        center=center,
        radius=r,
        net_separation=sep,
        packing_count=count,
        log2_count=math.log2(count) if count else 0.0,
        candidates=len(inside),
        seed=seed,
    )


def doubling_dimension_bound(d: int, k: int, mu: int, c: float | None = None) -> float:
    """
    log2 of the doubling-constant bound (43^d k mu)^k for (mu, eps)-curves with k vertices,
    or (43^d c mu)^k for c-packed ones. Constant factors are dropped.
    """
    if d < 1 or k < 1 or mu < 1:
        raise ConstraintError(f"d, k and mu must be positive, got d={d} k={k} mu={mu}")
    spread_term = k if c is None else c
    if spread_term <= 0:
        raise ConstraintError(f"c must be positive, got {c}")
    return k * (d * math.log2(43) + math.log2(spread_term) + math.log2(mu))


def lower_bound_dimension(k: int, mu: int, m: int) -> float:
    """log2 of the lower-bound family size C((k - 2m) mu - 1, m)."""
    _check_family_params(mu, k, m)
    return math.log2(math.comb((k - 2 * m) * mu - 1, m))
