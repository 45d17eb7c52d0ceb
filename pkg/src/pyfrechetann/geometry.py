"""Euclidean primitives in arbitrary dimension: distances, ball clipping, canonical curves."""

from __future__ import annotations

from typing import Any

import numpy as np
import numpy.typing as npt

from .errors import DimensionMismatchError
from .types import Curve, Point, Segment

GEOM_TOL = 1e-9

# Empty parameter intervals are encoded as lo > hi.
_EMPTY_LO = 2.0
_EMPTY_HI = -1.0

FloatArray = npt.NDArray[np.float64]


def as_point(value: Any) -> Point:
    """Coerce a coordinate sequence to a finite float64 point."""
    point = np.asarray(value, dtype=np.float64)
    if point.ndim != 1 or point.size == 0:
        raise ValueError(f"A point must be a non-empty coordinate vector, got shape {point.shape}")
    if not np.all(np.isfinite(point)):
        raise ValueError("Point coordinates must be finite")
    return point


def check_dimensions(*arrays: npt.NDArray[Any]) -> int:
    """Return the shared trailing dimension or raise DimensionMismatchError."""
    dims = {int(np.shape(a)[-1]) for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Dimension mismatch: {sorted(dims)}")
    return dims.pop()


def point_distance(p: Point, q: Point) -> float:
    check_dimensions(p, q)
    return float(np.linalg.norm(np.asarray(p) - np.asarray(q)))


def ball_segment_intervals(
    centers: FloatArray, a: FloatArray, b: FloatArray, radius: float
) -> tuple[FloatArray, FloatArray]:
    """
    Clip every segment a[j] -> b[j] against every closed ball B_radius(centers[i]).

    Args:
        centers: Array of shape (N, d)
        a: Segment start points, shape (M, d)
        b: Segment end points, shape (M, d)
        radius: Ball radius (>= 0)

    Returns:
        Arrays lo, hi of shape (N, M) with the parameter interval [lo, hi] of the
        segment inside the ball, clipped to [0, 1]; empty intervals have lo > hi.
    """
    v = b - a
    w = a[None, :, :] - centers[:, None, :]
    quad = np.einsum("md,md->m", v, v)
    lin = np.einsum("md,nmd->nm", v, w)
    const = np.einsum("nmd,nmd->nm", w, w) - radius * radius

    lo = np.full(lin.shape, _EMPTY_LO)
    hi = np.full(lin.shape, _EMPTY_HI)

    moving = quad > 0.0
    if np.any(~moving):
        # Zero-length segments are a single point: all of [0, 1] or nothing.
        inside = (const <= 0.0) & ~moving[None, :]
        lo[inside] = 0.0
        hi[inside] = 1.0

    if np.any(moving):
        disc = lin * lin - quad[None, :] * const
        hit = (disc >= 0.0) & moving[None, :]
        if np.any(hit):
            root = np.sqrt(np.where(hit, disc, 0.0))
            safe_quad = np.where(moving, quad, 1.0)[None, :]
            t_lo = np.maximum((-lin - root) / safe_quad, 0.0)
            t_hi = np.minimum((-lin + root) / safe_quad, 1.0)
            ok = hit & (t_lo <= t_hi)
            lo[ok] = t_lo[ok]
            hi[ok] = t_hi[ok]
    return lo, hi


def ball_segment_interval(
    center: Point, a: Point, b: Point, radius: float
) -> tuple[float, float] | None:
    """Parameter interval of segment a -> b inside the closed ball, or None if disjoint."""
    check_dimensions(center, a, b)
    lo, hi = ball_segment_intervals(
        np.asarray(center, dtype=np.float64)[None, :],
        np.asarray(a, dtype=np.float64)[None, :],
        np.asarray(b, dtype=np.float64)[None, :],
        radius,
    )
    if lo[0, 0] > hi[0, 0]:
        return None
    return float(lo[0, 0]), float(hi[0, 0])


def point_segment_distances(points: FloatArray, a: FloatArray, b: FloatArray) -> FloatArray:
    """Distance matrix of shape (N, M) from points (N, d) to segments a[j] -> b[j] (M, d)."""
    v = b - a
    quad = np.einsum("md,md->m", v, v)
    w = points[:, None, :] - a[None, :, :]
    safe = np.where(quad > 0.0, quad, 1.0)
    t = np.where(quad[None, :] > 0.0, np.einsum("nmd,md->nm", w, v) / safe[None, :], 0.0)
    t = np.clip(t, 0.0, 1.0)
    gap = w - t[:, :, None] * v[None, :, :]
    return np.sqrt(np.einsum("nmd,nmd->nm", gap, gap))


def segment_segment_distances(
    a0: FloatArray, a1: FloatArray, b0: FloatArray, b1: FloatArray
) -> FloatArray:
    """
    Distance matrix of shape (N, M) between segments a0[i] -> a1[i] and b0[j] -> b1[j].

    The minimum is attained at an endpoint of one of the segments or at a pair of
    interior points whose connecting vector is orthogonal to both directions.
    """
    best = np.minimum(
        point_segment_distances(a0, b0, b1), point_segment_distances(a1, b0, b1)
    )
    best = np.minimum(best, point_segment_distances(b0, a0, a1).T)
    best = np.minimum(best, point_segment_distances(b1, a0, a1).T)

    u = a1 - a0
    v = b1 - b0
    w0 = a0[:, None, :] - b0[None, :, :]
    uu = np.einsum("nd,nd->n", u, u)[:, None]
    vv = np.einsum("md,md->m", v, v)[None, :]
    uv = u @ v.T
    uw = np.einsum("nd,nmd->nm", u, w0)
    vw = np.einsum("md,nmd->nm", v, w0)
    denom = uu * vv - uv * uv
    skew = denom > 1e-12 * uu * vv
    if np.any(skew):
        safe = np.where(skew, denom, 1.0)
        s = (uv * vw - vv * uw) / safe
        t = (uu * vw - uv * uw) / safe
        interior = skew & (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)
        if np.any(interior):
            gap = w0 + s[:, :, None] * u[:, None, :] - t[:, :, None] * v[None, :, :]
            inner = np.sqrt(np.einsum("nmd,nmd->nm", gap, gap))
            best = np.where(interior, np.minimum(best, inner), best)
    return best


def point_segment_distance(p: Point, s: Segment) -> float:
    """Exact Euclidean distance from p to the segment s as a point set."""
    point = as_point(p)
    check_dimensions(point, s.a, s.b)
    return float(point_segment_distances(point[None, :], s.a[None, :], s.b[None, :])[0, 0])


def segment_segment_distance(s1: Segment, s2: Segment) -> float:
    """Minimum distance over all point pairs of two segments; 0 iff they intersect."""
    check_dimensions(s1.a, s2.a)
    return float(
        segment_segment_distances(s1.a[None, :], s1.b[None, :], s2.a[None, :], s2.b[None, :])[
            0, 0
        ]
    )


def _on_segment(p: Point, a: Point, b: Point, tol: float) -> bool:
    return float(point_segment_distances(p[None, :], a[None, :], b[None, :])[0, 0]) <= tol


def canonicalize(curve: Curve, tol: float = GEOM_TOL) -> Curve:
    """
    Drop duplicate vertices and interior vertices lying on the segment between their
    neighbours. Endpoints are kept; the result has Frechet distance 0 to the input.
    """
    kept: list[Point] = []
    for vertex in curve.vertices:
        if kept and float(np.linalg.norm(vertex - kept[-1])) <= tol:
            continue
        while len(kept) >= 2 and _on_segment(kept[-1], kept[-2], vertex, tol):
            kept.pop()
        kept.append(vertex)
    if len(kept) == curve.complexity:
        return curve
    return Curve(vertices=np.stack(kept))
