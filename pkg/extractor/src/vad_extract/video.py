"""Video decoding and even frame sampling.

Two input forms are decodable: any file OpenCV can open, and a directory of
frame images (sorted by name), which is how surveillance benchmark footage
is often distributed.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .errors import DecodeError

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".webp"}


def even_sample_indices(total_frames: int, target_count: int) -> list[int]:
    """min(target, total) strictly increasing indices, endpoints included.

    Same rule as the scoring engine: round(i*(T-1)/(N-1)) with half-up
    rounding in exact integer arithmetic.
    """
    if total_frames < 1 or target_count < 1:
        raise ValueError("total_frames and target_count must be >= 1")
    count = min(target_count, total_frames)
    if count == 1:
        return [0]
    span, denom = total_frames - 1, count - 1
    return [(2 * i * span + denom) // (2 * denom) for i in range(count)]


def _frame_files(folder: Path) -> list[Path]:
    return sorted(
        p for p in folder.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file()
    )


def count_frames(path) -> int:
    """Number of frames in a video file or frame folder."""
    path = Path(path)
    if path.is_dir():
        count = len(_frame_files(path))
        if count == 0:
            raise DecodeError(f"{path}: folder contains no frame images")
        return count
    if not path.exists():
        raise DecodeError(f"{path}: no such file")
    capture = cv2.VideoCapture(str(path))
    try:
        if not capture.isOpened():
            raise DecodeError(f"{path}: OpenCV cannot open this file")
        count = int(capture.get(cv2.CAP_PROP_FRAME_COUNT))
        if count > 0:
            return count
        # Some containers do not report a count; fall back to walking the stream.
        count = 0
        while capture.grab():
            count += 1
        if count == 0:
            raise DecodeError(f"{path}: no decodable frames")
        return count
    finally:
        capture.release()


def read_frames(path, indices: list[int]) -> list[np.ndarray]:
    """Decode the given frame indices as RGB uint8 arrays, in index order."""
    path = Path(path)
    wanted = sorted(set(indices))
    if path.is_dir():
        files = _frame_files(path)
        if not files:
            raise DecodeError(f"{path}: folder contains no frame images")
        if wanted[-1] >= len(files):
            raise DecodeError(f"{path}: frame {wanted[-1]} out of range ({len(files)} frames)")
        frames = {}
        for idx in wanted:
            image = cv2.imread(str(files[idx]), cv2.IMREAD_COLOR)
            if image is None:
                raise DecodeError(f"{files[idx]}: unreadable frame image")
            frames[idx] = cv2.cvtColor(image, cv2.COLOR_BGR2RGB)
        return [frames[i] for i in indices]

    capture = cv2.VideoCapture(str(path))
    try:
        if not capture.isOpened():
            raise DecodeError(f"{path}: OpenCV cannot open this file")
        frames = {}
        position = 0
        remaining = set(wanted)
        while remaining:
            ok, image = capture.read()
            if not ok:
                raise DecodeError(
                    f"{path}: stream ended at frame {position}, needed frame {max(remaining)}"
                )
            if position in remaining:
                frames[position] = cv2.cvtColor(image, cv2.COLOR_BGR2RGB)
                remaining.discard(position)
            position += 1
        return [frames[i] for i in indices]
    finally:
        capture.release()
