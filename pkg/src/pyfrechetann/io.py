"""Curve files and index containers."""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError

from .ann import NearlyDoublingIndex, NearlyDoublingProjection, NetTree, frechet_oracle
from .errors import CurveFileError
from .pipeline import FrechetIndex, snap_projection
from .types import Curve, CurveRecord, FrechetConfig, IndexParams, MergeReport, SnappedCurve

logger = logging.getLogger(__name__)

INDEX_FORMAT_VERSION = 1


def format_curves(records: Sequence[CurveRecord]) -> str:
    """Render records in the text curve format: header "d n", then "id k x11 ... xkd"."""
    if not records:
        raise CurveFileError("A curve file needs at least one record")
    dim = records[0].curve.dim
    lines = [f"{dim} {len(records)}"]
    for record in records:
        if record.curve.dim != dim:
            raise CurveFileError(f"Record {record.id} has dimension {record.curve.dim}, not {dim}")
        if not record.id or any(ch.isspace() for ch in record.id):
            raise CurveFileError(f"Invalid curve id {record.id!r}")
        coords = " ".join(repr(float(x)) for x in record.curve.vertices.ravel().tolist())
        lines.append(f"{record.id} {record.curve.complexity} {coords}")
    return "\n".join(lines) + "\n"


def parse_curves(text: str, source: str = "<string>") -> list[CurveRecord]:
    """
    Parse the text curve format. Blank lines and lines starting with # are ignored.

    Raises:
        CurveFileError: On a malformed header or record, a count mismatch, duplicate ids
            or non-finite coordinates
    """
    lines = [
        (number, line.split())
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise CurveFileError(f"{source}: empty curve file")

    header_line, header = lines[0]
    try:
        dim, count = (int(token) for token in header)
    except ValueError as e:
        raise CurveFileError(f"{source}:{header_line}: header must be 'd n', got {header}") from e
    if dim < 1 or count < 0:
        raise CurveFileError(f"{source}:{header_line}: invalid header d={dim} n={count}")
    if len(lines) - 1 != count:
        raise CurveFileError(f"{source}: header announces {count} curves, found {len(lines) - 1}")

    records: list[CurveRecord] = []
    seen: set[str] = set()
    for number, tokens in lines[1:]:
        if len(tokens) < 2:
            raise CurveFileError(f"{source}:{number}: record needs an id and a vertex count")
        curve_id, raw_k, *raw_coords = tokens
        try:
            k = int(raw_k)
            coords = [float(token) for token in raw_coords]
        except ValueError as e:
            raise CurveFileError(f"{source}:{number}: {e}") from e
        if k < 1 or len(coords) != k * dim:
            raise CurveFileError(
                f"{source}:{number}: curve {curve_id} declares k={k} but has "
                f"{len(coords)} coordinates (expected {k * dim})"
            )
        if not all(math.isfinite(x) for x in coords):
            raise CurveFileError(f"{source}:{number}: curve {curve_id} has non-finite coordinates")
        if curve_id in seen:
            raise CurveFileError(f"{source}:{number}: duplicate curve id {curve_id}")
        seen.add(curve_id)
        vertices = [coords[i * dim : (i + 1) * dim] for i in range(k)]
        records.append(CurveRecord(id=curve_id, curve=Curve(vertices=vertices)))
    return records


def read_curves(path: str | Path) -> list[CurveRecord]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Curve file not found: {path}")
    return parse_curves(path.read_text(), source=str(path))


def write_curves(path: str | Path, records: Sequence[CurveRecord]) -> None:
    Path(path).write_text(format_curves(records))


def records_from_curves(curves: Iterable[Curve], prefix: str = "c") -> list[CurveRecord]:
    return [CurveRecord(id=f"{prefix}{i}", curve=c) for i, c in enumerate(curves)]


class SnappedEntry(BaseModel):
    vertices: list[list[float]]
    eps: float
    mu: int
    multipliers: list[int] = Field(default_factory=list)


class IndexDocument(BaseModel):
    """Versioned JSON container for a FrechetIndex."""

    format_version: Literal[1] = INDEX_FORMAT_VERSION
    params: IndexParams
    frechet: FrechetConfig
    ids: list[str]
    originals: list[list[list[float]]]
    snapped: list[SnappedEntry]
    ann_eps: float
    base: float
    topology: list[tuple[int, int | None]]
    back_map: list[int] = Field(description="Tree item -> position of its original")
    collisions: dict[int, list[int]] = Field(default_factory=dict)
    merges: MergeReport


def index_to_document(index: FrechetIndex) -> IndexDocument:
    return IndexDocument(
        params=index.params,
        frechet=index.cfg,
        ids=index.ids,
        originals=[c.vertices.tolist() for c in index.originals],
        snapped=[
            SnappedEntry(
                vertices=s.curve.vertices.tolist(), eps=s.eps, mu=s.mu, multipliers=s.multipliers
            )
            for s in index.snapped
        ],
        ann_eps=index.core.eps,
        base=index.tree.base,
        topology=index.tree.topology(),
        back_map=index.core.inverse,
        collisions=index.core.collisions,
        merges=index.merges,
    )


def index_from_document(doc: IndexDocument) -> FrechetIndex:
    """Rebuild an index without evaluating any distance."""
    if not (len(doc.originals) == len(doc.snapped) == len(doc.ids)):
        raise CurveFileError("Index document has inconsistent curve counts")
    originals = [Curve(vertices=v) for v in doc.originals]
    snapped = [
        SnappedCurve(
            curve=Curve(vertices=s.vertices),
            eps=s.eps,
            mu=s.mu,
            origin_id=doc.ids[i],
            multipliers=s.multipliers,
        )
        for i, s in enumerate(doc.snapped)
    ]

    oracle = frechet_oracle(doc.frechet)
    items = [snapped[original].curve for original in doc.back_map]
    tree: NetTree[Curve] = NetTree.from_topology(items, doc.topology, oracle, doc.base)

    representative = [0] * len(originals)
    for node, original in enumerate(doc.back_map):
        representative[original] = node
    for rep, others in doc.collisions.items():
        for other in others:
            representative[other] = representative[rep]

    if doc.params.eps_hat > 0:
        projection = snap_projection(doc.params.eps_hat)
    else:
        projection = NearlyDoublingProjection.identity()
    core = NearlyDoublingIndex(
        originals, [s.curve for s in snapped], tree, representative, projection, doc.ann_eps
    )
    return FrechetIndex(doc.params, doc.ids, originals, snapped, core, doc.merges, doc.frechet)


def save_index(index: FrechetIndex, path: str | Path) -> None:
    """Write the index as JSON; floats use shortest round-trip repr, so loads are bit-exact."""
    payload = index_to_document(index).model_dump(mode="json")
    Path(path).write_text(json.dumps(payload, indent=1))
    logger.info("Index saved to %s", path)


def load_index(path: str | Path) -> FrechetIndex:
    """
    Load an index written by save_index.

    Raises:
        FileNotFoundError: If the file does not exist
        CurveFileError: If the content is not a valid index document
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Index file not found: {path}")
    try:
        doc = IndexDocument.model_validate(json.loads(path.read_text()))
    except (json.JSONDecodeError, ValidationError) as e:
        raise CurveFileError(f"{path}: not a valid index document: {e}") from e
    return index_from_document(doc)
