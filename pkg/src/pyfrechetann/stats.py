"""Dataset statistics: edge lengths, min pairwise Frechet distance, spread, packedness."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import ConstraintError, DegenerateDatasetError
from .frechet import frechet_decide, frechet_distance
from .geometry import (
    GEOM_TOL,
    ball_segment_intervals,
    canonicalize,
    check_dimensions,
    point_segment_distances,
    segment_segment_distances,
)
from .types import Curve, DatasetStats, FrechetConfig, Point

logger = logging.getLogger(__name__)

_SPREAD_CHUNK = 256


def distinct_curves(S: Iterable[Curve]) -> list[Curve]:
    """Canonical forms of S with exact duplicates removed, in lexicographic order."""
    unique = {c.key(): c for c in (canonicalize(curve) for curve in S)}
    return [unique[key] for key in sorted(unique)]


def lambda_max(S: Sequence[Curve]) -> float:
    """Largest edge length over all curves (0 when every curve is a point)."""
    return max((c.max_edge_length for c in S), default=0.0)


def min_pairwise_frechet(
    S: Sequence[Curve], cfg: FrechetConfig | None = None
) -> tuple[float, tuple[int, int]]:
    """
    Smallest Frechet distance between two curves of S and the index pair attaining it.

    Pairs are visited in increasing order of their endpoint lower bound; the scan stops
    once that bound reaches the current best, and pairs whose decision at the current
    best is negative are skipped without bisection.
    """
    if len(S) < 2:
        raise DegenerateDatasetError("Minimum pairwise distance needs at least two curves")
    check_dimensions(*(c.vertices for c in S))

    starts = np.stack([c.vertices[0] for c in S])
    ends = np.stack([c.vertices[-1] for c in S])
    start_gap = np.linalg.norm(starts[:, None, :] - starts[None, :, :], axis=-1)
    end_gap = np.linalg.norm(ends[:, None, :] - ends[None, :, :], axis=-1)
    rows, cols = np.triu_indices(len(S), k=1)
    bounds = np.maximum(start_gap, end_gap)[rows, cols]
    order = np.argsort(bounds, kind="stable")

    best = math.inf
    best_pair = (int(rows[order[0]]), int(cols[order[0]]))
    exact = 0
    for idx in order.tolist():
        if bounds[idx] >= best:
            break
        i, j = int(rows[idx]), int(cols[idx])
        if math.isfinite(best) and not frechet_decide(S[i], S[j], best, cfg):
            continue
        value = frechet_distance(S[i], S[j], cfg)
        exact += 1
        if value < best:
            best, best_pair = value, (i, j)
    logger.debug(
        "min pairwise Frechet %.9g over %d curves (%d bisections, %d pairs)",
        best,
        len(S),
        exact,
        len(bounds),
    )
    return best, best_pair


def min_point_gap(points: np.ndarray) -> float:
    """Smallest distance between two rows of points, computed block by block."""
    if len(points) < 2:
        raise DegenerateDatasetError("Minimum pairwise distance needs at least two points")
    best = math.inf
    for lo in range(0, len(points) - 1, _SPREAD_CHUNK):
        chunk = points[lo : lo + _SPREAD_CHUNK]
        gaps = np.linalg.norm(chunk[:, None, :] - points[None, lo:, :], axis=-1)
        # keep pairs (i, j) with j > i only
        gaps[np.tril_indices(len(chunk), m=gaps.shape[1])] = np.inf
        best = min(best, float(gaps.min()))
    return best


def _objects(S: Sequence[Curve]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    vertices = np.concatenate([c.vertices for c in S])
    starts = [c.vertices[:-1] for c in S if c.complexity > 1]
    ends = [c.vertices[1:] for c in S if c.complexity > 1]
    if not starts:
        empty = np.empty((0, vertices.shape[1]))
        return vertices, empty, empty
    return vertices, np.concatenate(starts), np.concatenate(ends)


def spread(S: Sequence[Curve], tol: float = GEOM_TOL) -> float:
    """
    Ratio between the largest and the smallest non-zero distance among all vertices and
    edges of S. Objects touching each other (an edge and its endpoint) are at distance 0
    and do not count. Returns 1.0 when no non-zero distance exists.
    """
    check_dimensions(*(c.vertices for c in S))
    vertices, a, b = _objects(S)
    smallest = math.inf
    largest = 0.0

    def account(block: np.ndarray) -> None:
        nonlocal smallest, largest
        positive = block[block > tol]
        if positive.size:
            smallest = min(smallest, float(positive.min()))
            largest = max(largest, float(positive.max()))

    for lo in range(0, len(vertices), _SPREAD_CHUNK):
        chunk = vertices[lo : lo + _SPREAD_CHUNK]
        account(np.linalg.norm(chunk[:, None, :] - vertices[None, :, :], axis=-1))
        if len(a):
            account(point_segment_distances(chunk, a, b))
    for lo in range(0, len(a), _SPREAD_CHUNK):
        account(
            segment_segment_distances(a[lo : lo + _SPREAD_CHUNK], b[lo : lo + _SPREAD_CHUNK], a, b)
        )

    if not math.isfinite(smallest):
        return 1.0
    return max(1.0, largest / smallest)


def dataset_stats(
    S: Sequence[Curve], cfg: FrechetConfig | None = None, delta_min: float | None = None
) -> DatasetStats:
    """
    Compute Lambda, delta_min, bundledness and spread of a curve set.

    Args:
        S: Curves; exact duplicates after canonicalization count once
        cfg: Frechet tolerances
        delta_min: Known lower bound on the minimum pairwise distance, skips the
            all-pairs computation

    Raises:
        DegenerateDatasetError: Fewer than two distinct curves, all edges of length 0,
            or two distinct curves at Frechet distance 0
    """
    cfg = FrechetConfig() if cfg is None else cfg
    curves = distinct_curves(S)
    if len(curves) < 2:
        raise DegenerateDatasetError(
            f"delta_min is undefined for {len(curves)} distinct curve(s); at least 2 are needed"
        )
    lam = lambda_max(curves)
    if lam <= 0.0:
        raise DegenerateDatasetError("All edges have length 0; bundledness is undefined")

    if delta_min is None:
        delta, _ = min_pairwise_frechet(curves, cfg)
        exact = True
    else:
        if not delta_min > 0:
            raise ConstraintError(f"delta_min override must be positive, got {delta_min}")
        delta, exact = float(delta_min), False
    if delta <= 0.0:
        raise DegenerateDatasetError("Two distinct curves are at Frechet distance 0")

    stats = DatasetStats(
        lambda_max=lam,
        delta_min=delta,
        bundledness=delta / lam,
        spread=spread(curves, cfg.geom_tol),
        n=len(curves),
        k_max=max(c.complexity for c in curves),
        delta_min_exact=exact,
        tolerance=cfg.tol_abs,
    )
    logger.debug("dataset stats: %s", stats)
    return stats


def bundledness_spread_ratio(stats: DatasetStats) -> float:
    """Inverse bundledness divided by spread; bounded by a constant on every dataset."""
    return (1.0 / stats.bundledness) / stats.spread


def clipped_lengths(P: Curve, centers: np.ndarray, radius: float) -> np.ndarray:
    """Arc length of P inside B_radius(center) for every row of centers."""
    if P.complexity == 1:
        return np.zeros(len(centers))
    lo, hi = ball_segment_intervals(centers, P.vertices[:-1], P.vertices[1:], radius)
    inside = np.clip(hi - lo, 0.0, None)
    return inside @ P.edge_lengths


def c_packedness_lower_bound(
    P: Curve, centers: Sequence[Point] | np.ndarray, radii: Sequence[float] | np.ndarray
) -> float:
    """
    Certified lower bound on the packedness of P: the largest ratio length(P in B_r(c)) / r
    over all tested centres c and radii r.

    Raises:
        ConstraintError: If a candidate set is empty or a radius is not positive
    """
    center_array = np.asarray(centers, dtype=np.float64)
    radius_array = np.asarray(radii, dtype=np.float64).reshape(-1)
    if center_array.size == 0 or radius_array.size == 0:
        raise ConstraintError("c-packedness estimation needs at least one centre and one radius")
    if center_array.ndim == 1:
        center_array = center_array[None, :]
    check_dimensions(center_array, P.vertices)
    if np.any(radius_array <= 0):
        raise ConstraintError("Radii must be positive")

    best = 0.0
    for r in radius_array.tolist():
        best = max(best, float(clipped_lengths(P, center_array, r).max()) / r)
    return best


def default_packedness_candidates(P: Curve) -> tuple[np.ndarray, np.ndarray]:
    """
    Vertex centres and radii for c_packedness_lower_bound.

    Radii are the distinct non-zero vertex-pair distances, refined geometrically so that
    consecutive radii differ by a factor of at most 2. Over balls centred at vertices,
    the true supremum is then at most twice the estimate.
    """
    vertices = P.vertices
    gaps = np.linalg.norm(vertices[:, None, :] - vertices[None, :, :], axis=-1)
    distances = np.unique(gaps[gaps > GEOM_TOL])
    if distances.size == 0:
        return vertices, np.array([1.0])

    radii = [float(distances[0])]
    for r in distances[1:].tolist():
        while r > 2.0 * radii[-1]:
            radii.append(2.0 * radii[-1])
        radii.append(r)
    return vertices, np.array(radii)
