"""Exact k-nearest-neighbor index over pooled train embeddings.

The anomaly score of a query is the mean of its k smallest squared
Euclidean distances to the index rows.  Search is exact brute force: at
this artifact's scale (tens to a few thousand train vectors) nothing
faster is warranted and exactness keeps the test oracle trivial.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, ValidationError

log = logging.getLogger(__name__)


def l2_normalize(vector: np.ndarray) -> np.ndarray:
    """Unit-normalize a vector; the zero vector is returned unchanged."""
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        return vector
    return vector / norm


@dataclass(frozen=True)
class TrainIndex:
    """Immutable collection of train vectors; rows are read-only after build."""

    ids: tuple[str, ...]
    vectors: np.ndarray
    normalized: bool = False

    @property
    def size(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dims(self) -> int:
        return int(self.vectors.shape[1])


@dataclass(frozen=True)
class KnnScore:
    """Anomaly score with its supporting neighbors, distances sorted ascending."""

    score: float
    neighbor_ids: tuple[str, ...]
    neighbor_distances: np.ndarray


def build_index(
    vectors: Iterable[tuple[str, np.ndarray]], normalize: bool = False
) -> TrainIndex:
    """Build an index from (video_id, vector) pairs; row order is preserved."""
    ids: list[str] = []
    rows: list[np.ndarray] = []
    dims: int | None = None
    for video_id, vec in vectors:
        arr = np.asarray(vec, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValidationError(
                f"vector for '{video_id}' must be 1-D and non-empty, got shape {arr.shape}"
            )
        if dims is None:
            dims = arr.shape[0]
        elif arr.shape[0] != dims:
            raise ValidationError(
                f"vector for '{video_id}' has dimension {arr.shape[0]}, expected {dims}"
            )
        if not np.isfinite(arr).all():
            raise ValidationError(f"vector for '{video_id}' contains NaN or Inf")
        if normalize:
            arr = l2_normalize(arr)
        ids.append(video_id)
        rows.append(arr)
    if not rows:
        raise ValidationError("cannot build an index from an empty train set")
    matrix = np.vstack(rows)
    matrix.setflags(write=False)
    return TrainIndex(ids=tuple(ids), vectors=matrix, normalized=normalize)


def score(index: TrainIndex, query: np.ndarray, k: int) -> KnnScore:
    """Mean of the k smallest squared distances from ``query`` to the index rows.

    k is clamped to the index size; distance ties break on lower row number.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ContractError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != index.dims:
        raise ContractError(
            f"query has shape {q.shape}, index expects dimension {index.dims}"
        )
    if not np.isfinite(q).all():
        raise ContractError("query contains NaN or Inf")
    if index.normalized:
        q = l2_normalize(q)

    effective_k = min(k, index.size)
    if effective_k < k:
        log.warning(
            "k=%d exceeds index size N=%d; clamping to %d", k, index.size, effective_k
        )
    diff = index.vectors - q
    distances = np.einsum("ij,ij->i", diff, diff)
    order = np.argsort(distances, kind="stable")[:effective_k]
    neighbor_distances = distances[order]
    return KnnScore(
        score=float(np.mean(neighbor_distances)),
        neighbor_ids=tuple(index.ids[i] for i in order),
        neighbor_distances=neighbor_distances,
    )


def score_batch(
    index: TrainIndex,
    queries: Sequence[np.ndarray],
    k: int,
    threads: int = 1,
) -> list[KnnScore]:
    """Score queries in order; elementwise identical to mapping ``score``.

    Queries are independent, so results are bitwise identical for any thread
    count.  The first failing query aborts the batch with its position.
    """

    def one(position_query):
        position, query = position_query
        try:
            return score(index, query, k)
        except ContractError as exc:
            raise ContractError(f"query {position}: {exc}") from exc

    items = list(enumerate(queries))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, items))
    return [one(item) for item in items]
