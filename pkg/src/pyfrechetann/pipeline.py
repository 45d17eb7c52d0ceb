"""FrechetANN: nearest-neighbour index over polygonal curves under the Frechet distance."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from .ann import (
    MetricOracle,
    NearlyDoublingIndex,
    NearlyDoublingProjection,
    NetTree,
    ann_query,
    build_generalized_ann,
    frechet_oracle,
    generic_nearly_doubling_ann,
)
from .errors import ConstraintError, DegenerateDatasetError
from .geometry import canonicalize, check_dimensions
from .snap import snap_curve, snap_mu_bound, validate_snapped
from .stats import dataset_stats, lambda_max, min_point_gap
from .types import (
    Curve,
    FrechetConfig,
    IndexParams,
    MergeReport,
    QueryCertificate,
    SnappedCurve,
)

logger = logging.getLogger(__name__)


def dedup(S: Sequence[Curve], ids: Sequence[str] | None = None) -> tuple[list[Curve], MergeReport]:
    """
    Canonicalize, sort lexicographically by vertex sequence and merge exact duplicates.

    Args:
        S: Input curves
        ids: Identifier per curve; defaults to the input position

    Returns:
        Surviving canonical curves in sorted order, and a report naming the survivors and
        mapping every merged id to the id that absorbed it
    """
    ids = [str(i) for i in range(len(S))] if ids is None else list(ids)
    if len(ids) != len(S):
        raise ConstraintError(f"{len(S)} curves but {len(ids)} ids")
    if len(set(ids)) != len(ids):
        raise ConstraintError("Curve ids must be unique")

    canonical = [canonicalize(c) for c in S]
    order = sorted(range(len(S)), key=lambda i: canonical[i].key())

    survivors: list[Curve] = []
    report = MergeReport()
    previous_key = None
    for i in order:
        key = canonical[i].key()
        if key == previous_key:
            report.merged[ids[i]] = report.survivors[-1]
            continue
        survivors.append(canonical[i])
        report.survivors.append(ids[i])
        previous_key = key
    if report.merged:
        logger.debug("dedup merged %d of %d curves", len(report.merged), len(S))
    return survivors, report


def snap_projection(eps_hat: float) -> NearlyDoublingProjection:
    """Snapping onto the eps_hat grid; moves every curve by at most eps_hat / 2."""
    return NearlyDoublingProjection(
        project=lambda curve: snap_curve(curve, eps_hat).curve,
        bound=eps_hat / 2,
        name=f"snap(eps={eps_hat:.6g})",
    )


class FrechetIndex:
    """
    Built index: deduplicated originals, their snapped images and a net tree over the
    distinct snapped curves. Immutable after construction; queries are thread-safe.
    """

    def __init__(
        self,
        params: IndexParams,
        ids: Sequence[str],
        originals: Sequence[Curve],
        snapped: Sequence[SnappedCurve],
        core: NearlyDoublingIndex[Curve],
        merges: MergeReport,
        cfg: FrechetConfig | None = None,
    ):
        self.params = params
        self.cfg = FrechetConfig(tol_abs=params.tolerance) if cfg is None else cfg
        self.ids = list(ids)
        self.originals = list(originals)
        self.snapped = list(snapped)
        self.core = core
        self.merges = merges

    @property
    def tree(self) -> NetTree[Curve]:
        return self.core.tree

    @property
    def oracle(self) -> MetricOracle[Curve]:
        return self.core.tree.oracle

    @property
    def back_map(self) -> dict[int, str]:
        """Tree item -> id of the original it stands for."""
        return {node: self.ids[original] for node, original in enumerate(self.core.inverse)}

    @property
    def collisions(self) -> dict[str, list[str]]:
        """Representative id -> ids of originals whose snapped curves coincided with it."""
        return {
            self.ids[rep]: [self.ids[o] for o in others]
            for rep, others in self.core.collisions.items()
        }

    def __len__(self) -> int:
        return len(self.originals)

    def query(
        self, q: Curve, cfg: FrechetConfig | None = None
    ) -> tuple[str, float, QueryCertificate]:
        """Approximate nearest original of q with its distance and a certificate."""
        check_dimensions(q.vertices, self.originals[0].vertices)
        base = self.oracle if cfg is None else frechet_oracle(cfg)
        oracle: MetricOracle[Curve] = MetricOracle(base.distance, base.tolerance, base.name)

        node, snapped_distance = ann_query(self.tree, q, self.core.eps, oracle)
        original = self.core.inverse[node]
        distance = oracle(q, self.originals[original])
        answer_id = self.ids[original]
        certificate = QueryCertificate(
            mode=self.params.mode,
            answer_id=answer_id,
            distance=distance,
            snapped_distance=snapped_distance,
            snapped_answer=self.tree.items[node].vertices.tolist(),
            slack_budget=self.params.slack_budget,
            collisions=[self.ids[o] for o in self.core.collisions.get(original, [])],
            evaluations=oracle.evaluations,
        )
        return answer_id, distance, certificate


def _prepare(
    S: Sequence[Curve], ids: Sequence[str] | None
) -> tuple[list[Curve], list[str], MergeReport]:
    if not S:
        raise ConstraintError("Cannot build an index over an empty curve set")
    check_dimensions(*(c.vertices for c in S))
    curves, merges = dedup(S, ids)
    return curves, list(merges.survivors), merges


def _assemble(
    params: IndexParams,
    curves: list[Curve],
    ids: list[str],
    merges: MergeReport,
    core: NearlyDoublingIndex[Curve],
    cfg: FrechetConfig,
) -> FrechetIndex:
    if params.eps_hat > 0:
        snapped = [snap_curve(c, params.eps_hat, origin_id=i) for c, i in zip(curves, ids)]
        for s in snapped:
            if not validate_snapped(s.curve, params.eps_hat, params.mu):
                raise ConstraintError(
                    f"Snapped curve {s.origin_id} is not a ({params.mu}, {params.eps_hat})-curve"
                )
    else:
        snapped = [
            SnappedCurve(curve=c, eps=1.0, mu=1, origin_id=i, multipliers=[])
            for c, i in zip(curves, ids)
        ]
    index = FrechetIndex(params, ids, curves, snapped, core, merges, cfg)
    if index.collisions:
        logger.warning("Snapping merged originals: %s", index.collisions)
    logger.info(
        "built %s index: %d curves, %d tree items, eps_hat=%.6g mu=%d",
        params.mode,
        len(curves),
        len(index.tree),
        params.eps_hat,
        params.mu,
    )
    return index


def build_additive(
    S: Sequence[Curve],
    eps: float,
    eps_add: float,
    cfg: FrechetConfig | None = None,
    ids: Sequence[str] | None = None,
) -> FrechetIndex:
    """
    Index with the guarantee d_F(q, answer) <= (1 + eps) min_s d_F(q, s) + eps_add.

    Curves are snapped onto the grid eps_hat = eps_add / 2, giving (mu, eps_hat)-curves
    with mu = ceil(Lambda / eps_hat) + 1, and indexed in a net tree.

    Raises:
        ConstraintError: If S is empty, eps is outside (0, 1) or eps_add <= 0
        DegenerateDatasetError: If several curves collapse onto one after deduplication
    """
    if not 0 < eps < 1:
        raise ConstraintError(f"eps must lie in (0, 1) for the additive build, got {eps}")
    if not eps_add > 0:
        raise ConstraintError(f"eps_add must be positive, got {eps_add}")
    cfg = FrechetConfig() if cfg is None else cfg
    curves, survivor_ids, merges = _prepare(S, ids)
    if len(S) > 1 and len(curves) < 2:
        raise DegenerateDatasetError(
            f"All {len(S)} curves are duplicates of one curve; the additive index needs "
            "two distinct curves or a single input curve"
        )

    eps_hat = eps_add / 2
    lam = lambda_max(curves)
    params = IndexParams(
        mode="additive",
        eps=eps,
        ann_eps=eps,
        eps_add=eps_add,
        eps_hat=eps_hat,
        mu=snap_mu_bound(lam, eps_hat) if lam > 0 else 1,
        lambda_max=lam,
        tolerance=cfg.tol_abs,
    )
    logger.debug("additive cascade: %s", params)
    core = generic_nearly_doubling_ann(curves, snap_projection(eps_hat), frechet_oracle(cfg), eps)
    return _assemble(params, curves, survivor_ids, merges, core, cfg)


def build_multiplicative(
    S: Sequence[Curve],
    eps: float,
    cfg: FrechetConfig | None = None,
    ids: Sequence[str] | None = None,
    delta_min: float | None = None,
) -> FrechetIndex:
    """
    Index with the pure guarantee d_F(q, answer) <= (1 + eps) min_s d_F(q, s).

    Sets eps' = eps / 4 and eps'' = eps' * delta_min and runs the additive construction
    with (eps', eps''). With fewer than two distinct curves the index degenerates to the
    single survivor and params.degenerate is set.

    Args:
        delta_min: Known minimum pairwise Frechet distance; computed exactly when omitted

    Raises:
        ConstraintError: If S is empty or eps is outside (0, 1]
    """
    if not 0 < eps <= 1:
        raise ConstraintError(f"eps must lie in (0, 1], got {eps}")
    cfg = FrechetConfig() if cfg is None else cfg
    curves, survivor_ids, merges = _prepare(S, ids)
    oracle = frechet_oracle(cfg)

    if len(curves) < 2:
        logger.warning("Fewer than two distinct curves: building a single-answer index")
        lam = lambda_max(curves)
        params = IndexParams(
            mode="multiplicative",
            eps=eps,
            ann_eps=eps / 4,
            eps_add=0.0,
            eps_hat=0.0,
            mu=1,
            lambda_max=lam,
            tolerance=cfg.tol_abs,
            degenerate=True,
        )
        core = generic_nearly_doubling_ann(
            curves, NearlyDoublingProjection.identity(), oracle, eps / 4
        )
        return _assemble(params, curves, survivor_ids, merges, core, cfg)

    try:
        stats = dataset_stats(curves, cfg, delta_min)
    except DegenerateDatasetError:
        if lambda_max(curves) > 0:
            raise
        # Point curves only: Lambda is 0 but delta_min is still defined.
        stats = None
    lam = lambda_max(curves)
    if stats is not None:
        delta = stats.delta_min
    elif delta_min is not None:
        delta = delta_min
    else:
        delta = min_point_gap(np.stack([c.vertices[0] for c in curves]))
    eps_prime = eps / 4
    eps_second = eps_prime * delta
    eps_hat = eps_second / 2
    params = IndexParams(
        mode="multiplicative",
        eps=eps,
        ann_eps=eps_prime,
        eps_add=eps_second,
        eps_hat=eps_hat,
        mu=snap_mu_bound(lam, eps_hat) if lam > 0 else 1,
        lambda_max=lam,
        tolerance=cfg.tol_abs,
        stats=stats,
    )
    logger.debug(
        "multiplicative cascade: delta_min=%.9g eps'=%.6g eps''=%.9g eps_hat=%.9g mu=%d",
        delta,
        eps_prime,
        eps_second,
        eps_hat,
        params.mu,
    )
    core = build_generalized_ann(
        curves, lambda extent: snap_projection(extent / 2), oracle, eps, delta_min=delta
    )
    return _assemble(params, curves, survivor_ids, merges, core, cfg)


def query(
    idx: FrechetIndex, q: Curve, cfg: FrechetConfig | None = None
) -> tuple[str, float, QueryCertificate]:
    """Answer an approximate nearest-neighbour query; see FrechetIndex.query."""
    return idx.query(q, cfg)
