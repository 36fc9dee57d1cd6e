"""Per-frame scoring via overlapping constant-length windows.

Each window of a video is pooled to one vector and scored against an index
built from all train-video windows; a frame's score is the mean of the
scores of every window containing it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding_io import EmbeddingMatrix
from .errors import ManifestParseError, StorageError, ValidationError
from .knn import TrainIndex, build_index, score_batch
from .pooling import PoolingMode, pool_rows

FRAME_SCORES_SCHEMA = "vad.frame_scores.v1"


@dataclass(frozen=True)
class WindowConfig:
    """Window length and stride in frames; 1 <= stride <= length."""

    length: int
    stride: int = 1

    def __post_init__(self):
        if self.length < 1:
            raise ValidationError(f"window length must be >= 1, got {self.length}")
        if not 1 <= self.stride <= self.length:
            raise ValidationError(
                f"stride must satisfy 1 <= stride <= length, got "
                f"stride={self.stride}, length={self.length}"
            )


@dataclass
class FrameScoreSeries:
    video_id: str
    scores: np.ndarray  # one non-negative float64 per frame


def enumerate_windows(frame_count: int, cfg: WindowConfig) -> list[tuple[int, int]]:
    """Half-open frame ranges covering [0, frame_count).

    Windows are [i*S, i*S+L) while they fit; a video shorter than L yields the
    single window [0, F); if the stride pattern leaves a tail uncovered, a
    final window [F-L, F) is appended.
    """
    if frame_count < 1:
        raise ValidationError(f"frame_count must be >= 1, got {frame_count}")
    if frame_count < cfg.length:
        return [(0, frame_count)]
    windows = []
    start = 0
    while start + cfg.length <= frame_count:
        windows.append((start, start + cfg.length))
        start += cfg.stride
    if windows[-1][1] < frame_count:
        windows.append((frame_count - cfg.length, frame_count))
    return windows


def build_window_index(
    train_videos: Sequence[EmbeddingMatrix],
    cfg: WindowConfig,
    mode: PoolingMode,
    normalize: bool = False,
) -> TrainIndex:
    """Index whose rows are the pooled embeddings of every train-video window."""
    if not train_videos:
        raise ValidationError("cannot build a window index from an empty train set")
    rows = []
    for video in train_videos:
        video.validate()
        for start, end in enumerate_windows(video.frames, cfg):
            rows.append(
                (
                    f"{video.video_id}#{start}:{end}",
                    pool_rows(video.data[start:end], mode),
                )
            )
    return build_index(rows, normalize=normalize)


def score_frames(
    index: TrainIndex,
    video: EmbeddingMatrix,
    cfg: WindowConfig,
    mode: PoolingMode,
    k: int,
    threads: int = 1,
) -> FrameScoreSeries:
    """Per-frame anomaly scores: mean window score over the windows covering each frame."""
    video.validate()
    windows = enumerate_windows(video.frames, cfg)
    queries = [pool_rows(video.data[start:end], mode) for start, end in windows]
    window_scores = score_batch(index, queries, k, threads=threads)

    totals = np.zeros(video.frames, dtype=np.float64)
    counts = np.zeros(video.frames, dtype=np.int64)
    for (start, end), result in zip(windows, window_scores):
        totals[start:end] += result.score
        counts[start:end] += 1
    return FrameScoreSeries(video_id=video.video_id, scores=totals / counts)


def write_frame_scores(path, header: dict, series: Sequence[FrameScoreSeries]) -> None:
    """Emit one JSON line per frame: {video_id, frame, score}; header line first."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"schema": FRAME_SCORES_SCHEMA, **header}) + "\n")
            for item in series:
                for frame, value in enumerate(item.scores):
                    fh.write(
                        json.dumps(
                            {"video_id": item.video_id, "frame": frame, "score": float(value)}
                        )
                        + "\n"
                    )
    except OSError as exc:
        raise StorageError(f"cannot write frame scores {path}: {exc}") from exc


def read_frame_scores(path) -> tuple[dict, list[FrameScoreSeries]]:
    """Read a frame-scores file back into per-video series, frames in file order."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise StorageError(f"cannot read frame scores {path}: {exc}") from exc
    header: dict = {}
    per_video: dict[str, list[float]] = {}
    order: list[str] = []
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
            if obj["schema"] != FRAME_SCORES_SCHEMA:
                raise ManifestParseError(
                    line_number, f"unexpected schema '{obj['schema']}'"
                )
            header = obj
            continue
        try:
            video_id, score = str(obj["video_id"]), float(obj["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestParseError(line_number, f"bad frame-score line: {exc}") from exc
        if video_id not in per_video:
            per_video[video_id] = []
            order.append(video_id)
        per_video[video_id].append(score)
    return header, [
        FrameScoreSeries(video_id=v, scores=np.asarray(per_video[v], dtype=np.float64))
        for v in order
    ]
