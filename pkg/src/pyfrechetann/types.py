"""Pydantic types for pyfrechetann."""

from __future__ import annotations

from collections.abc import Iterator
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator

# A point of R^d is a 1-d float64 array of length d.
Point = npt.NDArray[np.float64]


def _frozen_array(value: Any, ndim: int, what: str) -> npt.NDArray[np.float64]:
    array = np.array(value, dtype=np.float64)
    if ndim == 2 and array.ndim == 1:
        # A flat list of scalars is a curve in R^1.
        array = array.reshape(-1, 1)
    if array.ndim != ndim:
        raise ValueError(f"{what} must be a {ndim}-dimensional array, got shape {array.shape}")
    if array.size == 0 or array.shape[-1] < 1:
        raise ValueError(f"{what} must not be empty")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{what} contains non-finite coordinates")
    array.setflags(write=False)
    return array


class Curve(BaseModel):
    """Polygonal curve given by an ordered list of vertices in R^d."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: np.ndarray = Field(description="Vertex array of shape (k, d)")

    @field_validator("vertices", mode="before")
    @classmethod
    def _coerce_vertices(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, 2, "Curve vertices")

    @property
    def complexity(self) -> int:
        """Number of vertices k."""
        return int(self.vertices.shape[0])

    @property
    def dim(self) -> int:
        return int(self.vertices.shape[1])

    @property
    def edge_lengths(self) -> npt.NDArray[np.float64]:
        """Euclidean length of every edge (empty for a single point)."""
        return np.linalg.norm(np.diff(self.vertices, axis=0), axis=1)

    @property
    def max_edge_length(self) -> float:
        lengths = self.edge_lengths
        return float(lengths.max()) if lengths.size else 0.0

    def edges(self) -> Iterator[Segment]:
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            yield Segment(a=a, b=b)

    def key(self) -> tuple[tuple[float, ...], ...]:
        """Vertex sequence as nested tuples, used for lexicographic ordering."""
        return tuple(tuple(row) for row in self.vertices.tolist())

    def translate(self, offset: Any) -> Curve:
        return Curve(vertices=self.vertices + np.asarray(offset, dtype=np.float64))

    def scale(self, factor: float) -> Curve:
        return Curve(vertices=self.vertices * factor)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Curve):
            return NotImplemented
        return bool(np.array_equal(self.vertices, other.vertices))

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Curve(k={self.complexity}, d={self.dim}, vertices={self.vertices.tolist()})"


class Segment(BaseModel):
    """Closed segment between two points of the same dimension."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: np.ndarray = Field(description="First endpoint")
    b: np.ndarray = Field(description="Second endpoint")

    @field_validator("a", "b", mode="before")
    @classmethod
    def _coerce_endpoint(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, 1, "Segment endpoint")

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Segment):
            return NotImplemented
        return bool(np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b))

    def __hash__(self) -> int:
        return hash((tuple(self.a.tolist()), tuple(self.b.tolist())))


class FrechetConfig(BaseModel):
    """Numeric tolerances governing every Frechet evaluation."""

    model_config = ConfigDict(frozen=True)

    tol_abs: float = Field(default=1e-7, gt=0, description="Absolute bisection tolerance tau")
    tol_rel: float = Field(
        default=1e-7, ge=0, description="Bisection tolerance relative to the discrete upper bound"
    )
    max_iter: int = Field(default=200, ge=1, description="Bisection iteration cap")
    geom_tol: float = Field(
        default=1e-9, ge=0, description="Absolute tolerance for on-segment and interval tests"
    )

    def tolerance_for(self, upper: float) -> float:
        """Bisection tolerance for a distance bracketed below `upper`."""
        return max(self.tol_abs, self.tol_rel * upper)


class SnappedCurve(BaseModel):
    """A (mu, eps)-curve produced by snapping an input curve."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    curve: Curve
    eps: float = Field(gt=0, description="Grid unit eps")
    mu: int = Field(ge=1, description="Largest realised edge multiplier (at least 1)")
    origin_id: str = Field(default="", description="Identifier of the source curve")
    multipliers: list[int] = Field(
        default_factory=list, description="Edge length of every edge in units of eps"
    )


class CurveRecord(BaseModel):
    """A curve with its identifier, as stored in curve files."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    curve: Curve


class DatasetStats(BaseModel):
    """Dataset-level quantities driving parameter choices."""

    lambda_max: float = Field(ge=0, description="Largest edge length over the set")
    delta_min: float = Field(ge=0, description="Smallest pairwise Frechet distance")
    bundledness: float = Field(gt=0, description="delta_min / lambda_max")
    spread: float = Field(ge=1, description="Spread of the vertex and edge set")
    n: int = Field(ge=0, description="Number of distinct curves")
    k_max: int = Field(ge=1, description="Largest complexity")
    delta_min_exact: bool = Field(
        default=True, description="False when delta_min came from a caller override"
    )
    tolerance: float = Field(default=0.0, ge=0, description="Frechet tolerance used")

    def __str__(self) -> str:
        return (
            f"n={self.n} k_max={self.k_max} lambda={self.lambda_max:.6g} "
            f"delta_min={self.delta_min:.6g} bundledness={self.bundledness:.6g} "
            f"spread={self.spread:.6g}"
        )


class FamilyMember(BaseModel):
    """One curve of the lower-bound family with the index tuple that generated it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    indices: tuple[int, ...]
    curve: Curve


class LowerBoundFamily(BaseModel):
    """Center curve plus zig-zag members, all at Frechet distance 1/2 from the center."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mu: int = Field(gt=1)
    k: int = Field(ge=1)
    m: int = Field(ge=0)
    center: Curve
    members: list[FamilyMember]
    skipped: int = Field(default=0, ge=0, description="Tuples rejected by the complexity guard")
    total: int = Field(ge=0, description="Number of admissible index tuples before any limit")


class PackingReport(BaseModel):
    """Result of a greedy separated-net count inside a Frechet ball."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    center: Curve
    radius: float = Field(gt=0)
    net_separation: float = Field(gt=0)
    packing_count: int = Field(ge=0)
    log2_count: float
    candidates: int = Field(ge=0, description="Curves found inside the ball")
    seed: int | None = None

    def __str__(self) -> str:
        return (
            f"packing={self.packing_count} (log2 {self.log2_count:.3f}) "
            f"inside ball={self.candidates} r={self.radius:.6g} sep={self.net_separation:.6g}"
        )


class MergeReport(BaseModel):
    """Outcome of duplicate elimination."""

    survivors: list[str] = Field(default_factory=list, description="Ids kept, in sorted order")
    merged: dict[str, str] = Field(
        default_factory=dict, description="Merged id -> id of the surviving duplicate"
    )


class IndexParams(BaseModel):
    """Parameter cascade of a FrechetIndex."""

    mode: Literal["additive", "multiplicative"]
    eps: float = Field(gt=0, description="Requested approximation factor")
    ann_eps: float = Field(gt=0, description="Approximation factor used inside the net tree")
    eps_add: float = Field(ge=0, description="Additive slack of the additive construction")
    eps_hat: float = Field(ge=0, description="Snapping grid unit, eps_add / 2")
    mu: int = Field(ge=1, description="Edge multiplier cap, ceil(lambda / eps_hat) + 1")
    lambda_max: float = Field(ge=0)
    tolerance: float = Field(gt=0, description="Frechet oracle tolerance tau")
    base: float = Field(default=2.0, gt=1)
    degenerate: bool = Field(
        default=False, description="Multiplicative build fell back to a single-answer index"
    )
    stats: DatasetStats | None = None

    @property
    def slack_budget(self) -> float:
        """Additive slack of the query guarantee, including solver tolerance."""
        tau_slack = 6 * self.tolerance
        if self.mode == "additive":
            return self.eps_add + tau_slack
        return tau_slack


class QueryCertificate(BaseModel):
    """Evidence attached to a FrechetIndex answer."""

    mode: Literal["additive", "multiplicative"]
    answer_id: str
    distance: float = Field(ge=0, description="Frechet distance from the query to the answer")
    snapped_distance: float = Field(
        ge=0, description="Frechet distance from the query to the snapped answer"
    )
    snapped_answer: list[list[float]] = Field(
        default_factory=list, description="Vertices of the snapped curve the net tree returned"
    )
    slack_budget: float = Field(ge=0)
    collisions: list[str] = Field(
        default_factory=list, description="Original ids merged into the answer by snapping"
    )
    evaluations: int = Field(default=0, ge=0, description="Distance evaluations spent")

    def __str__(self) -> str:
        return (
            f"{self.answer_id} d={self.distance:.9g} snapped={self.snapped_distance:.9g} "
            f"slack={self.slack_budget:.3g} evals={self.evaluations}"
        )


class GeneratorConfig(BaseModel):
    """Dataset generator selection for experiments."""

    name: Literal["random_walk", "uniform_points", "lower_bound"] = Field(default="random_walk")
    params: dict[str, float] = Field(default_factory=dict)


class ExperimentConfig(BaseModel):
    """Complete benchmark configuration."""

    seed: int = Field(default=0, description="Seed for every random choice")
    sizes: list[int] = Field(default_factory=lambda: [100, 400, 1600], min_length=1)
    k: int = Field(default=4, ge=1, description="Curve complexity")
    d: int = Field(default=2, ge=1, description="Ambient dimension")
    eps: list[float] = Field(default_factory=lambda: [0.5], min_length=1)
    mode: Literal["additive", "multiplicative"] = Field(default="multiplicative")
    eps_add: float = Field(default=0.1, gt=0, description="Additive slack for additive mode")
    tolerance: float = Field(default=1e-7, gt=0)
    queries: int = Field(default=50, ge=1)
    verify: bool = Field(default=True, description="Check every answer against brute force")
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, value: list[int]) -> list[int]:
        if any(n < 1 for n in value):
            raise ValueError("sizes must be positive")
        return value

    @field_validator("eps")
    @classmethod
    def _eps_range(cls, value: list[float]) -> list[float]:
        if any(not 0 < e <= 1 for e in value):
            raise ValueError("eps values must lie in (0, 1]")
        return value
