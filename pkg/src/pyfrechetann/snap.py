"""Projection of curves onto (mu, eps)-curves, whose edge lengths are integer multiples of eps."""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import ConstraintError
from .geometry import GEOM_TOL
from .types import Curve, SnappedCurve

logger = logging.getLogger(__name__)


def snap_curve(P: Curve, eps: float, origin_id: str = "") -> SnappedCurve:
    """
    Snap every edge of P to a length that is an integer multiple of eps.

    The first vertex is kept. Each following vertex moves along the ray from the
    previous snapped vertex towards the original one, to the nearest multiple of eps
    (half-integers round to even). A zero multiple repeats the previous vertex, so the
    complexity never changes and every vertex moves by at most eps / 2.

    Args:
        P: Curve to snap
        eps: Grid unit
        origin_id: Identifier of P carried on the result

    Returns:
        SnappedCurve whose mu is the largest realised multiplier (at least 1)

    Raises:
        ConstraintError: If eps is not positive
    """
    if not eps > 0 or not math.isfinite(eps):
        raise ConstraintError(f"eps must be positive and finite, got {eps}")

    source = P.vertices
    snapped = np.empty_like(source)
    snapped[0] = source[0]
    multipliers: list[int] = []
    for i in range(1, P.complexity):
        direction = source[i] - snapped[i - 1]
        length = float(np.linalg.norm(direction))
        multiple = int(np.rint(length / eps)) if length > 0.0 else 0
        if multiple == 0:
            snapped[i] = snapped[i - 1]
        else:
            snapped[i] = snapped[i - 1] + (multiple * eps / length) * direction
        multipliers.append(multiple)

    mu = max([1, *multipliers])
    return SnappedCurve(
        curve=Curve(vertices=snapped),
        eps=eps,
        mu=mu,
        origin_id=origin_id,
        multipliers=multipliers,
    )


def snap_mu_bound(lambda_max: float, eps: float) -> int:
    """Multiplier cap ceil(lambda / eps) + 1 guaranteed for any curve with edges <= lambda."""
    if not eps > 0:
        raise ConstraintError(f"eps must be positive, got {eps}")
    return math.ceil(lambda_max / eps) + 1


def validate_snapped(c: Curve, eps: float, mu: int, tol: float = GEOM_TOL) -> bool:
    """True iff every edge length is within tol of k * eps for an integer 0 <= k <= mu."""
    if not eps > 0:
        raise ConstraintError(f"eps must be positive, got {eps}")
    if mu < 0:
        raise ConstraintError(f"mu must be non-negative, got {mu}")
    lengths = c.edge_lengths
    if lengths.size == 0:
        return True
    multiples = np.rint(lengths / eps)
    on_grid = np.abs(lengths - multiples * eps) <= tol
    bounded = lengths <= mu * eps + tol
    return bool(np.all(on_grid & bounded))
