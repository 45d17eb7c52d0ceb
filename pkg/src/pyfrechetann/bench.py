"""Benchmark runner: build and query costs of FrechetIndex against dataset size and eps."""

from __future__ import annotations

import csv
import logging
import time
from collections import defaultdict
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from .ann import brute_force_nn, frechet_oracle
from .generators import generate
from .pipeline import FrechetIndex, build_additive, build_multiplicative
from .types import Curve, ExperimentConfig, FrechetConfig

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "generator",
    "n",
    "k",
    "d",
    "eps",
    "mode",
    "build_seconds",
    "query_seconds_mean",
    "evaluations_mean",
    "evaluations_max",
    "violations",
)


class BenchRow(BaseModel):
    """One benchmark measurement; field order is the CSV column order."""

    generator: str
    n: int
    k: int
    d: int
    eps: float
    mode: str
    build_seconds: float
    query_seconds_mean: float
    evaluations_mean: float
    evaluations_max: int
    violations: int


def _build(config: ExperimentConfig, curves: Sequence[Curve], eps: float) -> FrechetIndex:
    cfg = FrechetConfig(tol_abs=config.tolerance)
    if config.mode == "additive":
        return build_additive(curves, eps, config.eps_add, cfg)
    return build_multiplicative(curves, eps, cfg)


def count_violations(
    index: FrechetIndex, queries: Sequence[Curve], answers: Sequence[float]
) -> int:
    """Queries whose answer exceeds (1 + eps) * exact minimum + slack budget."""
    oracle = frechet_oracle(index.cfg)
    bound_slack = index.params.slack_budget
    violations = 0
    for q, distance in zip(queries, answers):
        _, exact = brute_force_nn(index.originals, q, oracle)
        if distance > (1 + index.params.eps) * exact + bound_slack:
            violations += 1
            logger.warning(
                "guarantee violated: %.9g > (1+%g) * %.9g", distance, index.params.eps, exact
            )
    return violations


def run_benchmark(
    config: ExperimentConfig, on_row: Callable[[BenchRow], None] | None = None
) -> list[BenchRow]:
    """Run every (n, eps) combination of config and return one row per combination."""
    rows: list[BenchRow] = []
    for n in config.sizes:
        rng = np.random.default_rng([config.seed, n])
        curves = generate(config.generator, rng, n, config.k, config.d)
        queries = generate(config.generator, rng, config.queries, config.k, config.d)
        for eps in config.eps:
            start = time.perf_counter()
            index = _build(config, curves, eps)
            build_seconds = time.perf_counter() - start

            timings: list[float] = []
            evaluations: list[int] = []
            answers: list[float] = []
            for q in queries:
                start = time.perf_counter()
                _, distance, certificate = index.query(q)
                timings.append(time.perf_counter() - start)
                evaluations.append(certificate.evaluations)
                answers.append(distance)

            row = BenchRow(
                generator=config.generator.name,
                n=n,
                k=config.k,
                d=config.d,
                eps=eps,
                mode=config.mode,
                build_seconds=build_seconds,
                query_seconds_mean=float(np.mean(timings)),
                evaluations_mean=float(np.mean(evaluations)),
                evaluations_max=int(max(evaluations)),
                violations=count_violations(index, queries, answers) if config.verify else 0,
            )
            logger.debug("bench row: %s", row)
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return rows


def write_csv(rows: Sequence[BenchRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump())


def read_csv(path: str | Path) -> list[BenchRow]:
    with open(path, newline="") as f:
        return [BenchRow(**record) for record in csv.DictReader(f)]


def fit_log_linear(ns: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares fit values ~ a + b * log2(n); returns (a, b, R^2)."""
    x = np.log2(np.asarray(ns, dtype=np.float64))
    y = np.asarray(values, dtype=np.float64)
    b, a = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (a + b * x)) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - residual / total if total > 0 else 1.0
    return float(a), float(b), r2


def write_plot_data(rows: Sequence[BenchRow], out_dir: str | Path) -> list[Path]:
    """One gnuplot data file per (mode, eps): columns n, query seconds, evaluations."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series: dict[tuple[str, float], list[BenchRow]] = defaultdict(list)
    for row in rows:
        series[(row.mode, row.eps)].append(row)

    written = []
    for (mode, eps), group in sorted(series.items()):
        path = out_dir / f"{mode}_eps{eps:g}.dat"
        lines = [f"# {mode} eps={eps:g}", "# n build_seconds query_seconds_mean evaluations_mean"]
        for row in sorted(group, key=lambda r: r.n):
            lines.append(
                f"{row.n} {row.build_seconds!r} {row.query_seconds_mean!r} {row.evaluations_mean!r}"
            )
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written
