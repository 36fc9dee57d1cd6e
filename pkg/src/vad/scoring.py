"""Per-video scoring pipeline: manifest in, anomaly-score records out."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .embedding_io import (
    LABELS,
    DatasetManifest,
    ManifestEntry,
    read_embedding,
)
from .errors import (
    ClassLookupError,
    ManifestParseError,
    ProtocolError,
    StorageError,
    VadError,
)
from .knn import build_index, score_batch
from .pooling import PoolingMode, even_sample_indices, pool

SCORES_SCHEMA = "vad.scores.v1"


@dataclass(frozen=True)
class ScoreRecord:
    """One test video's anomaly score with its ground-truth label."""

    video_id: str
    class_name: str
    score: float
    label: str


@dataclass(frozen=True)
class Decision:
    """Thresholded call on one record; anomalous iff score strictly exceeds threshold."""

    video_id: str
    score: float
    threshold: float
    is_anomalous: bool


def _load_pooled(entry: ManifestEntry, mode: PoolingMode, frames: int | None):
    try:
        matrix = read_embedding(entry.path, entry.video_id)
    except VadError as exc:
        raise type(exc)(f"video '{entry.video_id}': {exc}") from exc
    if frames is not None and matrix.frames > frames:
        rows = even_sample_indices(matrix.frames, frames)
        matrix.data = matrix.data[rows]
    return pool(matrix, mode)


def run_class(
    manifest: DatasetManifest,
    class_name: str,
    mode: PoolingMode,
    k: int,
    *,
    normalize: bool = False,
    frames: int | None = None,
    threads: int = 1,
) -> list[ScoreRecord]:
    """Score every test video of one class against an index of its train videos."""
    train = manifest.entries_for(class_name, "train")
    test = manifest.entries_for(class_name, "test")
    if not train and not test:
        raise ClassLookupError(f"manifest has no entries for class '{class_name}'")
    if not train:
        raise ClassLookupError(f"class '{class_name}' has no train entries")
    if not test:
        raise ClassLookupError(f"class '{class_name}' has no test entries")
    for entry in train:
        if entry.label != "normal":
            raise ProtocolError(
                f"train video '{entry.video_id}' is labeled '{entry.label}'"
            )

    index = build_index(
        ((e.video_id, _load_pooled(e, mode, frames)) for e in train),
        normalize=normalize,
    )
    queries = [_load_pooled(e, mode, frames) for e in test]
    results = score_batch(index, queries, k, threads=threads)
    return [
        ScoreRecord(
            video_id=entry.video_id,
            class_name=entry.class_name,
            score=result.score,
            label=entry.label,
        )
        for entry, result in zip(test, results)
    ]


def decide(records: Sequence[ScoreRecord], threshold: float) -> list[Decision]:
    """Flag records whose score is strictly greater than ``threshold``."""
    return [
        Decision(
            video_id=r.video_id,
            score=r.score,
            threshold=threshold,
            is_anomalous=r.score > threshold,
        )
        for r in records
    ]


def write_score_records(path, header: dict, records: Sequence[ScoreRecord]) -> None:
    """Write the scores file: one header line, then one JSON line per record."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"schema": SCORES_SCHEMA, **header}) + "\n")
            for r in records:
                fh.write(
                    json.dumps(
                        {
                            "video_id": r.video_id,
                            "class_name": r.class_name,
                            "score": r.score,
                            "label": r.label,
                        }
                    )
                    + "\n"
                )
    except OSError as exc:
        raise StorageError(f"cannot write scores file {path}: {exc}") from exc


def read_score_records(path) -> tuple[dict, list[ScoreRecord]]:
    """Read a per-video scores file; any malformed line fails with its number."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageError(f"cannot read scores file {path}: {exc}") from exc
    header: dict = {}
    records: list[ScoreRecord] = []
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestParseError(line_number, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ManifestParseError(line_number, "expected a JSON object")
        if "schema" in obj:
            if obj["schema"] != SCORES_SCHEMA:
                raise ManifestParseError(
                    line_number,
                    f"not a per-video scores file (schema '{obj['schema']}')",
                )
            header = obj
            continue
        missing = [f for f in ("video_id", "class_name", "score", "label") if f not in obj]
        if missing:
            raise ManifestParseError(line_number, f"missing fields {missing}")
        try:
            score = float(obj["score"])
        except (TypeError, ValueError) as exc:
            raise ManifestParseError(line_number, f"score is not a number: {exc}") from exc
        if not math.isfinite(score) or score < 0:
            raise ManifestParseError(
                line_number, f"score must be finite and >= 0, got {obj['score']}"
            )
        if obj["label"] not in LABELS:
            raise ManifestParseError(line_number, f"unknown label '{obj['label']}'")
        records.append(
            ScoreRecord(
                video_id=str(obj["video_id"]),
                class_name=str(obj["class_name"]),
                score=score,
                label=str(obj["label"]),
            )
        )
    return header, records
