"""Discrete and continuous Frechet distance, free-space decision and Delta-stabbers."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from .errors import ConstraintError, ConvergenceError
from .geometry import ball_segment_intervals, check_dimensions
from .types import Curve, FrechetConfig, Point

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = FrechetConfig()

Interval = tuple[float, float]


def _resolve(cfg: FrechetConfig | None) -> FrechetConfig:
    return DEFAULT_CONFIG if cfg is None else cfg


def discrete_frechet(P: Curve, Q: Curve) -> float:
    """Exact discrete Frechet distance via the O(nm) coupling dynamic program."""
    check_dimensions(P.vertices, Q.vertices)
    dist = np.linalg.norm(P.vertices[:, None, :] - Q.vertices[None, :, :], axis=-1).tolist()
    n, m = len(dist), len(dist[0])

    prev = [0.0] * m
    prev[0] = dist[0][0]
    for j in range(1, m):
        prev[j] = max(prev[j - 1], dist[0][j])
    for i in range(1, n):
        row = dist[i]
        cur = [0.0] * m
        cur[0] = max(prev[0], row[0])
        for j in range(1, m):
            reach = min(prev[j], cur[j - 1], prev[j - 1])
            cur[j] = reach if reach > row[j] else row[j]
        prev = cur
    return float(prev[-1])


def _point_curve_distance(p: Point, Q: Curve) -> float:
    # A point against a curve: the leash must reach the farthest vertex.
    return float(np.linalg.norm(Q.vertices - p[None, :], axis=1).max())


def _intervals(centers: np.ndarray, path: np.ndarray, radius: float) -> list[list[Interval | None]]:
    lo, hi = ball_segment_intervals(centers, path[:-1], path[1:], radius)
    rows: list[list[Interval | None]] = []
    for lo_row, hi_row in zip(lo.tolist(), hi.tolist()):
        rows.append([(a, b) if a <= b else None for a, b in zip(lo_row, hi_row)])
    return rows


def _free_space_reachable(P: Curve, Q: Curve, radius: float) -> bool:
    n, m = P.complexity, Q.complexity
    # left[i][j]: free interval on Q-edge j seen from P-vertex i (cell column boundaries)
    # bottom[i][j]: free interval on P-edge i seen from Q-vertex j (cell row boundaries)
    left_free = _intervals(P.vertices, Q.vertices, radius)
    bottom_free_t = _intervals(Q.vertices, P.vertices, radius)
    bottom_free = [[bottom_free_t[j][i] for j in range(m)] for i in range(n - 1)]

    left: list[list[Interval | None]] = [[None] * (m - 1) for _ in range(n)]
    bottom: list[list[Interval | None]] = [[None] * m for _ in range(n - 1)]

    open_edge = True
    for j in range(m - 1):
        free = left_free[0][j]
        if open_edge and free is not None and free[0] <= 0.0:
            left[0][j] = free
            open_edge = free[1] >= 1.0
        else:
            open_edge = False
    open_edge = True
    for i in range(n - 1):
        free = bottom_free[i][0]
        if open_edge and free is not None and free[0] <= 0.0:
            bottom[i][0] = free
            open_edge = free[1] >= 1.0
        else:
            open_edge = False

    for i in range(n - 1):
        for j in range(m - 1):
            enter_left = left[i][j]
            enter_bottom = bottom[i][j]
            if enter_left is None and enter_bottom is None:
                continue
            right_free = left_free[i + 1][j]
            if right_free is not None:
                if enter_bottom is not None:
                    left[i + 1][j] = right_free
                else:
                    lo = max(right_free[0], enter_left[0])  # type: ignore[index]
                    if lo <= right_free[1]:
                        left[i + 1][j] = (lo, right_free[1])
            top_free = bottom_free[i][j + 1]
            if top_free is not None:
                if enter_left is not None:
                    bottom[i][j + 1] = top_free
                else:
                    lo = max(top_free[0], enter_bottom[0])  # type: ignore[index]
                    if lo <= top_free[1]:
                        bottom[i][j + 1] = (lo, top_free[1])

    return left[n - 1][m - 2] is not None or bottom[n - 2][m - 1] is not None


def frechet_decide(P: Curve, Q: Curve, delta: float, cfg: FrechetConfig | None = None) -> bool:
    """
    Decide whether the continuous Frechet distance of P and Q is at most delta.

    Uses free-space reachability on the cell boundaries of the (k_P - 1) x (k_Q - 1)
    parameter grid. Zero-length edges are stationary parts of the parametrisation.
    The radius is widened by cfg.geom_tol so boundary cases resolve to True.
    """
    cfg = _resolve(cfg)
    check_dimensions(P.vertices, Q.vertices)
    if delta < 0:
        raise ConstraintError(f"delta must be non-negative, got {delta}")
    radius = delta + cfg.geom_tol

    if float(np.linalg.norm(P.vertices[0] - Q.vertices[0])) > radius:
        return False
    if float(np.linalg.norm(P.vertices[-1] - Q.vertices[-1])) > radius:
        return False
    if P.complexity == 1:
        return _point_curve_distance(P.vertices[0], Q) <= radius
    if Q.complexity == 1:
        return _point_curve_distance(Q.vertices[0], P) <= radius
    return _free_space_reachable(P, Q, radius)


def frechet_distance(P: Curve, Q: Curve, cfg: FrechetConfig | None = None) -> float:
    """
    Continuous Frechet distance within cfg.tolerance_for(upper bound).

    Bisects frechet_decide between the endpoint lower bound and the discrete Frechet
    upper bound. The returned value is the upper end of the final bracket. A bracket
    whose midpoint can no longer be represented between its ends counts as converged.

    Raises:
        DimensionMismatchError: If P and Q differ in dimension
        ConvergenceError: If the bracket does not shrink below the tolerance within max_iter
    """
    cfg = _resolve(cfg)
    check_dimensions(P.vertices, Q.vertices)
    if P.complexity == 1:
        return _point_curve_distance(P.vertices[0], Q)
    if Q.complexity == 1:
        return _point_curve_distance(Q.vertices[0], P)

    lo = max(
        float(np.linalg.norm(P.vertices[0] - Q.vertices[0])),
        float(np.linalg.norm(P.vertices[-1] - Q.vertices[-1])),
    )
    hi = discrete_frechet(P, Q)
    tol = cfg.tolerance_for(hi)
    if hi - lo <= tol:
        return hi
    if frechet_decide(P, Q, lo, cfg):
        return lo

    for _ in range(cfg.max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if frechet_decide(P, Q, mid, cfg):
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol:
            return hi
    raise ConvergenceError(
        f"Frechet bisection stopped at bracket [{lo!r}, {hi!r}] without reaching "
        f"tolerance {tol!r} in {cfg.max_iter} iterations"
    )


def is_delta_stabber(
    a: Point,
    b: Point,
    pts: Sequence[Point] | np.ndarray,
    delta: float,
    cfg: FrechetConfig | None = None,
) -> bool:
    """
    Decide whether the segment a -> b visits the balls B_delta(p_1), ..., B_delta(p_n)
    in order, i.e. whether parameters 0 <= t_1 <= ... <= t_n <= 1 exist with
    ||l(t_i) - p_i|| <= delta.
    """
    cfg = _resolve(cfg)
    points = np.asarray(pts, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ConstraintError("is_delta_stabber needs a non-empty list of points")
    start = np.asarray(a, dtype=np.float64)
    end = np.asarray(b, dtype=np.float64)
    check_dimensions(start, end, points)
    if delta < 0:
        raise ConstraintError(f"delta must be non-negative, got {delta}")

    lo, hi = ball_segment_intervals(points, start[None, :], end[None, :], delta + cfg.geom_tol)
    t = 0.0
    for lo_i, hi_i in zip(lo[:, 0].tolist(), hi[:, 0].tolist()):
        if lo_i > hi_i:
            return False
        t = max(t, lo_i)
        if t > hi_i:
            return False
    return True
