"""Embedding file and dataset manifest formats.

Embedding file layout (little-endian):

    bytes 0-3    magic ``PHNT``
    bytes 4-5    version, u16, currently 1
    bytes 6-9    D (feature dimension), u32
    bytes 10-13  F (frame count), u32
    bytes 14-    payload: F*D IEEE-754 f32, row-major (frame-major)

A file is valid iff the magic and version match, D >= 1, F >= 1, the
payload holds exactly F*D floats and every value is finite.

Manifests are UTF-8 JSON-lines, one entry per line with the fields
``video_id``, ``class_name``, ``split``, ``label`` and ``path``; unknown
fields are ignored.  ``path`` is resolved relative to the manifest's own
directory so datasets stay relocatable.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CorruptionError,
    FormatError,
    ManifestParseError,
    ProtocolError,
    StorageError,
    ValidationError,
)

MAGIC = b"PHNT"
VERSION = 1
_HEADER = struct.Struct("<4sHII")
HEADER_SIZE = _HEADER.size  # 14 bytes
FLOAT_SIZE = 4

SPLITS = ("train", "test")
LABELS = ("normal", "anomalous")


@dataclass(eq=False)
class EmbeddingMatrix:
    """Per-frame feature matrix of one video; a 1-row matrix is a video-level feature."""

    video_id: str
    data: np.ndarray

    def __post_init__(self):
        # Values outside f32 range become Inf here; validate() rejects them.
        with np.errstate(over="ignore"):
            self.data = np.ascontiguousarray(self.data, dtype=np.float32)

    @property
    def frames(self) -> int:
        return int(self.data.shape[0])

    @property
    def dims(self) -> int:
        return int(self.data.shape[1])

    def validate(self) -> None:
        if self.data.ndim != 2:
            raise ValidationError(
                f"embedding data must be 2-dimensional, got shape {self.data.shape}"
            )
        f, d = self.data.shape
        if f < 1 or d < 1:
            raise ValidationError(f"embedding shape {f}x{d} must be at least 1x1")
        if not np.isfinite(self.data).all():
            raise ValidationError("embedding contains NaN or Inf values")

    def __eq__(self, other) -> bool:
        # Structural equality: identical shape and bit-identical f32 payload.
        # video_id is carried metadata (the file format does not store it).
        if not isinstance(other, EmbeddingMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            (self.data.view(np.uint32) == other.data.view(np.uint32)).all()
        )


def write_embedding(matrix: EmbeddingMatrix, path) -> None:
    """Write ``matrix`` to ``path``; validates invariants before touching disk."""
    matrix.validate()
    header = _HEADER.pack(MAGIC, VERSION, matrix.dims, matrix.frames)
    payload = matrix.data.tobytes(order="C")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise StorageError(f"cannot write embedding file {path}: {exc}") from exc


def read_embedding(path, video_id: str | None = None) -> EmbeddingMatrix:
    """Read and validate an embedding file.

    ``video_id`` defaults to the file's stem; the on-disk format carries no id.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read embedding file {path}: {exc}") from exc

    if len(raw) >= len(MAGIC) and raw[: len(MAGIC)] != MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:len(MAGIC)]!r}, expected {MAGIC!r}")
    if len(raw) < HEADER_SIZE:
        raise CorruptionError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, dims, frames = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}, expected {VERSION}")
    if dims < 1 or frames < 1:
        raise ValidationError(f"{path}: declared shape {frames}x{dims} must be at least 1x1")

    expected = frames * dims * FLOAT_SIZE
    actual = len(raw) - HEADER_SIZE
    if actual != expected:
        raise CorruptionError(
            f"{path}: payload holds {actual} bytes, header declares {expected}"
        )

    data = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).reshape(frames, dims)
    matrix = EmbeddingMatrix(video_id if video_id is not None else path.stem, data.copy())
    if not np.isfinite(matrix.data).all():
        raise ValidationError(f"{path}: payload contains NaN or Inf values")
    return matrix


@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    class_name: str
    split: str
    label: str
    path: Path


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def class_names(self) -> list[str]:
        return sorted({e.class_name for e in self.entries})

    def entries_for(self, class_name: str, split: str | None = None) -> list[ManifestEntry]:
        return [
            e
            for e in self.entries
            if e.class_name == class_name and (split is None or e.split == split)
        ]


_REQUIRED_FIELDS = ("video_id", "class_name", "split", "label", "path")


def parse_manifest_lines(lines: Iterable[str], base_dir: Path) -> DatasetManifest:
    """Parse manifest text without touching embedding files.

    Enforces field validity, video_id uniqueness and the normal-only train
    protocol; blank lines are skipped.
    """
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestParseError(line_number, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ManifestParseError(line_number, "entry must be a JSON object")
        for name in _REQUIRED_FIELDS:
            value = obj.get(name)
            if not isinstance(value, str) or not value:
                raise ManifestParseError(
                    line_number, f"field '{name}' missing or not a non-empty string"
                )
        if obj["split"] not in SPLITS:
            raise ManifestParseError(
                line_number, f"split must be one of {SPLITS}, got '{obj['split']}'"
            )
        if obj["label"] not in LABELS:
            raise ManifestParseError(
                line_number, f"label must be one of {LABELS}, got '{obj['label']}'"
            )
        if obj["split"] == "train" and obj["label"] != "normal":
            raise ProtocolError(
                f"line {line_number}: train entry '{obj['video_id']}' is labeled "
                f"'{obj['label']}'; the train split must contain only normal videos"
            )
        if obj["video_id"] in seen:
            raise ValidationError(
                f"line {line_number}: duplicate video_id '{obj['video_id']}'"
            )
        seen.add(obj["video_id"])
        entries.append(
            ManifestEntry(
                video_id=obj["video_id"],
                class_name=obj["class_name"],
                split=obj["split"],
                label=obj["label"],
                path=(base_dir / obj["path"]).resolve(),
            )
        )
    return DatasetManifest(entries)


def load_manifest(path) -> DatasetManifest:
    """Load and validate a manifest; every referenced path must be a readable file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read manifest {path}: {exc}") from exc
    manifest = parse_manifest_lines(text.splitlines(), path.parent)
    for entry in manifest.entries:
        if not entry.path.is_file():
            raise StorageError(
                f"video '{entry.video_id}': embedding file {entry.path} does not exist"
            )
    return manifest


def write_manifest(path, rows: Sequence[dict]) -> None:
    """Write manifest rows (plain dicts, paths relative to the manifest) as JSON-lines."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write manifest {path}: {exc}") from exc
