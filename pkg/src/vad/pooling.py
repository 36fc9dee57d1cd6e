"""Temporal pooling: collapse a frame-feature sequence into one video vector."""

from __future__ import annotations

import enum

import numpy as np

from .embedding_io import EmbeddingMatrix
from .errors import ContractError

class PoolingMode(enum.Enum):
    AVERAGE = "average"
    MAXIMUM = "maximum"
    IDENTITY = "identity"

    @classmethod
    def from_token(cls, token: str) -> "PoolingMode":
        aliases = {
            "avg": cls.AVERAGE,
            "average": cls.AVERAGE,
            "max": cls.MAXIMUM,
            "maximum": cls.MAXIMUM,
            "identity": cls.IDENTITY,
        }
        try:
            return aliases[token.lower()]
        except KeyError:
            raise ContractError(f"unknown pooling mode '{token}'") from None


def pool_rows(rows: np.ndarray, mode: PoolingMode) -> np.ndarray:
    """Pool a (F, D) array of frame features into a float64 vector of length D.

    Average pooling accumulates in 64-bit; identity requires exactly one row.
    """
    if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
        raise ContractError(f"pooling input must be a non-empty 2-D array, got {rows.shape}")
    if mode is PoolingMode.AVERAGE:
        return rows.astype(np.float64, copy=False).mean(axis=0)
    if mode is PoolingMode.MAXIMUM:
        return rows.max(axis=0).astype(np.float64)
    if mode is PoolingMode.IDENTITY:
        if rows.shape[0] != 1:
            raise ContractError(
                f"identity pooling requires a single frame, got {rows.shape[0]}"
            )
        return rows[0].astype(np.float64)
    raise ContractError(f"unknown pooling mode {mode!r}")


def pool(matrix: EmbeddingMatrix, mode: PoolingMode) -> np.ndarray:
    """Pool a validated embedding matrix into one video-level float64 vector."""
    matrix.validate()
    return pool_rows(matrix.data, mode)


def even_sample_indices(total_frames: int, target_count: int) -> list[int]:
    """Evenly spaced frame indices: min(target_count, total_frames) of them,
    strictly increasing, endpoints included whenever possible.

    Index i maps to round(i * (T-1) / (N-1)) with half-up rounding, computed
    in exact integer arithmetic.
    """
    if total_frames < 1:
        raise ContractError(f"total_frames must be >= 1, got {total_frames}")
    if target_count < 1:
        raise ContractError(f"target_count must be >= 1, got {target_count}")
    count = min(target_count, total_frames)
    if count == 1:
        return [0]
    span = total_frames - 1
    denom = count - 1
    indices = [(2 * i * span + denom) // (2 * denom) for i in range(count)]
    # Spacing >= 1 once count is clamped to total_frames, so this dedup is a
    # safety net only.
    out: list[int] = []
    for idx in indices:
        if not out or idx != out[-1]:
            out.append(idx)
    return out
