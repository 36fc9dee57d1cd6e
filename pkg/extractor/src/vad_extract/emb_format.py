"""Client-side writers for the engine's wire formats.

Embedding files: 14-byte header (magic ``PHNT``, u16 version 1, u32 D,
u32 F, all little-endian) followed by F*D row-major f32 values.  Manifests:
JSON-lines with video_id/class_name/split/label/path.  Writes go through a
temp file and an atomic rename so a crashed run never leaves a torn file.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError

MAGIC = b"PHNT"
VERSION = 1
_HEADER = struct.Struct("<4sHII")


def _atomic_write(path: Path, payload: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_embedding_file(path, features: np.ndarray) -> None:
    """Write a (F, D) feature array as an embedding file."""
    path = Path(path)
    features = np.ascontiguousarray(features, dtype=np.float32)
    if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
        raise ValidationError(f"features must be (F, D) with F,D >= 1, got {features.shape}")
    if not np.isfinite(features).all():
        raise ValidationError("features contain NaN or Inf")
    frames, dims = features.shape
    _atomic_write(path, _HEADER.pack(MAGIC, VERSION, dims, frames) + features.tobytes())


def write_manifest(path, rows: Sequence[dict]) -> None:
    """Write manifest rows as JSON-lines, atomically."""
    path = Path(path)
    text = "".join(json.dumps(row) + "\n" for row in rows)
    _atomic_write(path, text.encode("utf-8"))


def write_sidecar(path, metadata: dict) -> None:
    """Write the provenance sidecar next to an embedding file."""
    _atomic_write(Path(path), (json.dumps(metadata, indent=2, sort_keys=True) + "\n").encode("utf-8"))
