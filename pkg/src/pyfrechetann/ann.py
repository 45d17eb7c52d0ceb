"""
(1+eps)-approximate nearest neighbours in doubling metrics.

A NetTree stores a hierarchy of nested nets over an abstract metric oracle: every item
has a top level and belongs to the net of every level at or below it. Level-l nets are
base^l separated, and every item is within base^(top+1) of its parent. Levels are
implicit, so chains of single children cost nothing.
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Callable, Sequence
from itertools import combinations, islice
from typing import Any, Generic, Literal, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config import parallel_map
from .errors import ConstraintError, DegenerateDatasetError, NetTreeError
from .frechet import frechet_distance
from .geometry import GEOM_TOL
from .types import FrechetConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")

OnDuplicate = Literal["raise", "merge"]


class MetricOracle(Generic[T]):
    """Distance function with a known additive error, counting its evaluations."""

    def __init__(self, distance: Callable[[T, T], float], tolerance: float = 0.0, name: str = ""):
        if tolerance < 0:
            raise ConstraintError(f"Oracle tolerance must be non-negative, got {tolerance}")
        self.distance = distance
        self.tolerance = tolerance
        self.name = name or getattr(distance, "__name__", "oracle")
        self._evaluations = 0
        self._lock = threading.Lock()

    @property
    def evaluations(self) -> int:
        return self._evaluations

    def reset(self) -> None:
        with self._lock:
            self._evaluations = 0

    def __call__(self, a: T, b: T) -> float:
        value = float(self.distance(a, b))
        with self._lock:
            self._evaluations += 1
        if not value >= 0 or not math.isfinite(value):
            raise NetTreeError(f"Oracle {self.name} returned invalid distance {value}")
        return value

    def __repr__(self) -> str:
        return f"MetricOracle({self.name}, tolerance={self.tolerance})"


def _euclidean(a: Any, b: Any) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))


def euclidean_oracle(tolerance: float = GEOM_TOL) -> MetricOracle[Any]:
    """Oracle over points of R^d."""
    return MetricOracle(_euclidean, tolerance, name="euclidean")


def frechet_oracle(cfg: FrechetConfig | None = None) -> MetricOracle[Any]:
    """Oracle over curves using the bisection Frechet distance; tolerance is cfg.tol_abs."""
    cfg = FrechetConfig() if cfg is None else cfg
    return MetricOracle(lambda p, q: frechet_distance(p, q, cfg), cfg.tol_abs, name="frechet")


class NetTree(Generic[T]):
    """
    Compressed net tree over items of a metric oracle.

    Invariants, up to oracle tolerance:
        covering: d(c, parent(c)) <= base^(top(c) + 1)
        separation: d(a, b) > base^min(top(a), top(b)) for distinct a, b
        nesting: top(parent(c)) > top(c)

    Items are identified by their insertion index. eps is chosen per query, so one tree
    serves every approximation factor.
    """

    def __init__(self, oracle: MetricOracle[T], base: float = 2.0):
        if not base > 1:
            raise ConstraintError(f"base must be > 1, got {base}")
        self.oracle = oracle
        self.base = base
        self.items: list[T] = []
        self.top: list[int] = []
        self.parent: list[int | None] = []
        self.children: list[dict[int, list[int]]] = []
        self.root_level = 0
        self.min_level = 0

    def __len__(self) -> int:
        return len(self.items)

    # -- scale arithmetic ---------------------------------------------------------------

    def radius(self, level: int) -> float:
        return float(self.base**level)

    def subtree_radius(self, level: int) -> float:
        """Bound on the distance from a level-`level` node to anything below it."""
        return float(self.base ** (level + 1) / (self.base - 1))

    def level_for(self, distance: float) -> int:
        """Smallest level l with base^l >= distance."""
        level = math.ceil(math.log(distance) / math.log(self.base))
        while self.radius(level) < distance:
            level += 1
        while self.radius(level - 1) >= distance:
            level -= 1
        return level

    def slack(self) -> float:
        """Accumulated oracle error along a root-to-leaf chain."""
        return (self.root_level - self.min_level + 4) * self.oracle.tolerance

    # -- construction ---------------------------------------------------------------------

    def _attach(self, item: T, top: int, parent: int | None) -> int:
        index = len(self.items)
        self.items.append(item)
        self.top.append(top)
        self.parent.append(parent)
        self.children.append({})
        if parent is not None:
            self.children[parent].setdefault(top, []).append(index)
            self.min_level = min(self.min_level, top)
        return index

    def insert(self, item: T, on_duplicate: OnDuplicate = "raise") -> int:
        """
        Insert item and return its index.

        The item's top level is one below the level of its nearest blocking node (a
        node b with d(item, b) <= base^top(b)), which becomes its parent. Items within
        2 * tolerance of an existing item are duplicates: they raise NetTreeError, or
        with on_duplicate="merge" return the index of the existing item.
        """
        if not self.items:
            return self._attach(item, self.root_level, None)

        oracle = self.oracle
        duplicate_radius = 2 * oracle.tolerance
        root_distance = oracle(item, self.items[0])
        if root_distance <= duplicate_radius:
            return self._duplicate(0, root_distance, on_duplicate)
        if root_distance > self.radius(self.root_level):
            self.root_level = self.level_for(root_distance)
            self.top[0] = self.root_level

        slack = self.slack()
        best, best_index = root_distance, 0
        stack = [(0, root_distance)]
        while stack:
            node, node_distance = stack.pop()
            for level, kids in self.children[node].items():
                bound = self.radius(level + 1) + self.subtree_radius(level)
                target = max(min(self.radius(level), best), duplicate_radius)
                if node_distance - bound - slack > target:
                    continue
                for child in kids:
                    distance = oracle(item, self.items[child])
                    if distance <= duplicate_radius:
                        return self._duplicate(child, distance, on_duplicate)
                    blocking = distance <= self.radius(level)
                    if blocking and (distance, child) < (best, best_index):
                        best, best_index = distance, child
                    below = max(min(best, self.radius(level - 1)), duplicate_radius)
                    reach = self.subtree_radius(level) + slack
                    if self.children[child] and distance - reach <= below:
                        stack.append((child, distance))

        top = self.level_for(best) - 1
        return self._attach(item, top, best_index)

    def _duplicate(self, existing: int, distance: float, on_duplicate: OnDuplicate) -> int:
        if on_duplicate == "merge":
            logger.debug("merging duplicate of item %d at distance %.3g", existing, distance)
            return existing
        raise NetTreeError(
            f"Item duplicates item {existing} (distance {distance:.3g} <= 2 * tolerance)"
        )

    # -- verification -------------------------------------------------------------------

    def audit(self) -> list[str]:
        """Recompute all pairwise distances and report every violated invariant."""
        problems: list[str] = []
        tol = self.slack()
        for child, parent in enumerate(self.parent):
            if parent is None:
                if child != 0:
                    problems.append(f"item {child} has no parent")
                continue
            if self.top[parent] <= self.top[child]:
                problems.append(
                    f"nesting: parent {parent} (top {self.top[parent]}) not above "
                    f"child {child} (top {self.top[child]})"
                )
            distance = self.oracle(self.items[child], self.items[parent])
            if distance > self.radius(self.top[child] + 1) + tol:
                problems.append(
                    f"covering: d({child}, parent {parent}) = {distance:.9g} exceeds "
                    f"{self.radius(self.top[child] + 1):.9g}"
                )
        for a in range(len(self.items)):
            for b in range(a + 1, len(self.items)):
                level = min(self.top[a], self.top[b])
                distance = self.oracle(self.items[a], self.items[b])
                if distance <= self.radius(level) - tol:
                    problems.append(
                        f"separation: d({a}, {b}) = {distance:.9g} at level {level} "
                        f"(radius {self.radius(level):.9g})"
                    )
        return problems

    def check(self) -> None:
        """Raise NetTreeError if the audit finds any violation."""
        problems = self.audit()
        if problems:
            raise NetTreeError("Net tree audit failed:\n" + "\n".join(problems[:20]))

    # -- topology ---------------------------------------------------------------------

    def topology(self) -> list[tuple[int, int | None]]:
        """(top level, parent index) of every item, in insertion order."""
        return list(zip(self.top, self.parent))

    @classmethod
    def from_topology(
        cls,
        items: Sequence[T],
        topology: Sequence[tuple[int, int | None]],
        oracle: MetricOracle[T],
        base: float = 2.0,
    ) -> NetTree[T]:
        """Rebuild a tree from an exported topology without evaluating any distance."""
        if len(items) != len(topology):
            raise NetTreeError(f"{len(items)} items but {len(topology)} topology entries")
        tree: NetTree[T] = cls(oracle, base)
        for index, (item, (top, parent)) in enumerate(zip(items, topology)):
            if (parent is None) != (index == 0):
                raise NetTreeError(f"Only item 0 may be the root (item {index})")
            if parent is not None and not 0 <= parent < index:
                raise NetTreeError(f"Item {index} refers to unknown parent {parent}")
            if index == 0:
                tree.root_level = top
            tree._attach(item, top, parent)
        return tree


def build_net_tree(
    items: Sequence[T],
    oracle: MetricOracle[T],
    base: float = 2.0,
    on_duplicate: OnDuplicate = "raise",
    audit: bool = False,
) -> tuple[NetTree[T], list[int]]:
    """
    Build a net tree by incremental insertion.

    Returns:
        The tree and, for every input item, the index of the tree item representing it
        (differs from insertion order only when duplicates are merged)
    """
    tree: NetTree[T] = NetTree(oracle, base)
    representatives = [tree.insert(item, on_duplicate) for item in items]
    logger.debug(
        "net tree: %d items, %d nodes, levels %d..%d, %d evaluations",
        len(items),
        len(tree),
        tree.min_level,
        tree.root_level,
        oracle.evaluations,
    )
    if audit:
        tree.check()
    return tree, representatives


def ann_query(
    tree: NetTree[T], q: T, eps: float, oracle: MetricOracle[T] | None = None
) -> tuple[int, float]:
    """
    (1+eps)-approximate nearest neighbour of q.

    Descends level by level keeping every node whose subtree may still hold an item
    closer than the best distance seen; stops once the subtree radius of the current
    level is at most eps / (1 + eps) times the best distance.

    Returns:
        (index, distance) with distance <= (1 + eps) * min distance + 2 * tolerance

    Raises:
        ConstraintError: If the tree is empty or eps is not positive
    """
    if not tree.items:
        raise ConstraintError("Cannot query an empty net tree")
    if not eps > 0:
        raise ConstraintError(f"eps must be positive, got {eps}")
    oracle = tree.oracle if oracle is None else oracle
    slack = tree.slack()

    candidates = {0: oracle(q, tree.items[0])}
    best, best_index = candidates[0], 0
    level = tree.root_level + 1
    while True:
        next_level = max(
            (lvl for node in candidates for lvl in tree.children[node] if lvl < level),
            default=None,
        )
        if next_level is None:
            break
        level = next_level
        fresh = [child for node in candidates for child in tree.children[node].get(level, ())]
        distances = parallel_map(lambda c: oracle(q, tree.items[c]), fresh)
        for child, distance in zip(fresh, distances):
            candidates[child] = distance
            if (distance, child) < (best, best_index):
                best, best_index = distance, child

        reach = tree.subtree_radius(level) + slack
        candidates = {node: d for node, d in candidates.items() if d <= best + reach}
        if reach <= eps / (1 + eps) * best:
            break
    return best_index, best


def brute_force_nn(items: Sequence[T], q: T, oracle: MetricOracle[T]) -> tuple[int, float]:
    """Exact nearest neighbour by exhaustive scan; ties go to the lowest index."""
    if not items:
        raise ConstraintError("Cannot search an empty item set")
    distances = parallel_map(lambda item: oracle(q, item), items)
    index = int(np.argmin(distances))
    return index, float(distances[index])


class NearlyDoublingProjection(BaseModel):
    """
    Projection pi_e of a metric space into a subspace of bounded doubling dimension with
    d(s, pi_e(s)) <= bound for every item s.

    The doubling constant of the image and the cost of evaluating pi_e are analytical
    quantities of the space and are not represented at runtime.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    project: Callable[[Any], Any]
    bound: float = Field(ge=0)
    name: str = "projection"

    @classmethod
    def identity(cls) -> NearlyDoublingProjection:
        return cls(project=lambda item: item, bound=0.0, name="identity")


class NearlyDoublingIndex(Generic[T]):
    """Net tree over projected items plus the inverse map back to the originals."""

    def __init__(
        self,
        originals: Sequence[T],
        projected: Sequence[T],
        tree: NetTree[T],
        representative: Sequence[int],
        projection: NearlyDoublingProjection,
        eps: float,
    ):
        self.originals = list(originals)
        self.projected = list(projected)
        self.tree = tree
        self.eps = eps
        self.projection = projection
        # tree item -> first original projected onto it
        self.inverse: list[int] = []
        self.collisions: dict[int, list[int]] = {}
        for original, node in enumerate(representative):
            if node == len(self.inverse):
                self.inverse.append(original)
            else:
                self.collisions.setdefault(self.inverse[node], []).append(original)
        if self.collisions:
            logger.warning(
                "%d projected items collided with an earlier representative",
                sum(len(v) for v in self.collisions.values()),
            )

    @property
    def oracle(self) -> MetricOracle[T]:
        return self.tree.oracle

    def query_projected(self, q: T) -> tuple[int, float]:
        """(original index, distance from q to its projection)."""
        node, distance = ann_query(self.tree, q, self.eps)
        return self.inverse[node], distance

    def query(self, q: T) -> tuple[int, float]:
        """(original index, distance from q to that original)."""
        original, _ = self.query_projected(q)
        return original, self.oracle(q, self.originals[original])

    __call__ = query


def generic_nearly_doubling_ann(
    S: Sequence[T],
    proj: NearlyDoublingProjection,
    oracle: MetricOracle[T],
    eps: float,
    base: float = 2.0,
    verify: bool = True,
) -> NearlyDoublingIndex[T]:
    """
    Index S through a projection into a doubling subspace.

    Answers s_hat satisfy d(q, s_hat) <= (1 + eps) d(q, s) + (2 + eps) * proj.bound for
    every s in S, plus oracle tolerance. Items whose projections coincide (within
    2 * tolerance) share one representative, the earliest in S.

    Raises:
        ConstraintError: If S is empty, the bound is not finite, or with verify=True
            a projection moves an item further than bound + tolerance
    """
    if not S:
        raise ConstraintError("Cannot index an empty set")
    if not math.isfinite(proj.bound):
        raise ConstraintError("Projection bound must be finite")
    if not eps > 0:
        raise ConstraintError(f"eps must be positive, got {eps}")

    projected = [proj.project(s) for s in S]
    if verify and proj.bound > 0:
        moved = parallel_map(lambda pair: oracle(pair[0], pair[1]), list(zip(S, projected)))
        worst = max(moved)
        if worst > proj.bound + oracle.tolerance:
            raise ConstraintError(
                f"Projection {proj.name} moved an item by {worst:.9g} > bound {proj.bound:.9g}"
            )

    tree, representative = build_net_tree(projected, oracle, base, on_duplicate="merge")
    return NearlyDoublingIndex(S, projected, tree, representative, proj, eps)


def min_pairwise_distance(S: Sequence[T], oracle: MetricOracle[T], batch: int = 4096) -> float:
    """
    Smallest oracle distance between two items of S by exhaustive comparison.

    Pairs are generated lazily and evaluated `batch` at a time.
    """
    if len(S) < 2:
        raise DegenerateDatasetError("Minimum pairwise distance needs at least two items")
    if batch < 1:
        raise ConstraintError(f"batch must be positive, got {batch}")
    pairs = combinations(range(len(S)), 2)
    best = math.inf
    while chunk := list(islice(pairs, batch)):
        best = min(best, *parallel_map(lambda p: oracle(S[p[0]], S[p[1]]), chunk))
    return best


def build_generalized_ann(
    S: Sequence[T],
    projection_for: Callable[[float], NearlyDoublingProjection],
    oracle: MetricOracle[T],
    eps: float,
    delta_min: float | None = None,
    base: float = 2.0,
) -> NearlyDoublingIndex[T]:
    """
    Pure (1+eps)-ANN for a tractably nearly-doubling space.

    With eps' = eps / 4 and e = eps' * delta_min, indexes S through projection_for(e)
    with approximation factor eps'. projection_for(e) must move items by at most e / 3,
    which keeps the additive error (2 + eps') * bound below e.

    Raises:
        DegenerateDatasetError: If S has fewer than two items at positive distance
    """
    if not 0 < eps <= 1:
        raise ConstraintError(f"eps must lie in (0, 1], got {eps}")
    delta = min_pairwise_distance(S, oracle) if delta_min is None else delta_min
    if delta <= 2 * oracle.tolerance:
        raise DegenerateDatasetError(f"Items are not separated (delta_min = {delta:.3g})")
    eps_prime = eps / 4
    extent = eps_prime * delta
    logger.debug("generalized ANN: delta_min=%.9g eps'=%.6g e=%.9g", delta, eps_prime, extent)
    return generic_nearly_doubling_ann(S, projection_for(extent), oracle, eps_prime, base)
