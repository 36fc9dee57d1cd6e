"""Single-video extraction and manifest-driven batch extraction."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch

from .backbones import Backbone, ExtractorSpec, load_backbone, preprocess_frames
from .emb_format import write_embedding_file, write_manifest, write_sidecar
from .errors import BatchError, ExtractError, ValidationError
from .video import count_frames, even_sample_indices, read_frames

log = logging.getLogger(__name__)

SPLITS = ("train", "test")
LABELS = ("normal", "anomalous")


def extract(video_path, spec: ExtractorSpec, out_path, backbone: Backbone | None = None) -> dict:
    """Extract one video to an embedding file plus a ``.meta.json`` sidecar.

    Image backbones emit one row per sampled frame; video backbones emit a
    single row.  Returns the sidecar metadata.
    """
    video_path, out_path = Path(video_path), Path(out_path)
    if backbone is None:
        backbone = load_backbone(spec)

    total = count_frames(video_path)
    if backbone.is_video:
        indices = even_sample_indices(total, backbone.clip_frames)
        padding = backbone.clip_frames - len(indices)
        indices = indices + [indices[-1]] * padding  # short clips repeat the last frame
        frames = read_frames(video_path, indices)
        clip = preprocess_frames(frames, spec.resolution).unsqueeze(0)
        features = backbone.extract_features(clip)
    else:
        indices = even_sample_indices(total, spec.frames)
        padding = 0
        frames = read_frames(video_path, indices)
        batch = preprocess_frames(frames, spec.resolution)
        features = backbone.extract_features(batch)

    write_embedding_file(out_path, features)
    metadata = {
        "source": str(video_path),
        "backbone": backbone.name,
        "architecture": backbone.architecture,
        "checkpoint": backbone.checkpoint,
        "frames_in_video": total,
        "frames_sampled": indices,
        "frames_padded": padding,
        "frames_written": int(features.shape[0]),
        "dims": int(features.shape[1]),
        "resolution": spec.resolution,
        "preprocessing": {
            "resize_shorter_side": max(spec.resolution, round(spec.resolution * 256 / 224)),
            "center_crop": spec.resolution,
            "mean": [0.485, 0.456, 0.406],
            "std": [0.229, 0.224, 0.225],
        },
        "torch_version": torch.__version__,
    }
    write_sidecar(out_path.with_name(out_path.name + ".meta.json"), metadata)
    return metadata


def read_video_list(path) -> list[dict]:
    """Parse a JSON-lines list mapping video files to (class, split, label).

    Required fields: path, class_name, split, label; video_id defaults to the
    file stem.  The normal-only train protocol is enforced here, before any
    extraction work starts.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ExtractError(f"cannot read video list {path}: {exc}") from exc
    rows: list[dict] = []
    seen: set[str] = set()
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"line {line_number}: invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ValidationError(f"line {line_number}: entry must be a JSON object")
        for name in ("path", "class_name", "split", "label"):
            if not isinstance(obj.get(name), str) or not obj[name]:
                raise ValidationError(
                    f"line {line_number}: field '{name}' missing or not a non-empty string"
                )
        if obj["split"] not in SPLITS:
            raise ValidationError(f"line {line_number}: split must be one of {SPLITS}")
        if obj["label"] not in LABELS:
            raise ValidationError(f"line {line_number}: label must be one of {LABELS}")
        if obj["split"] == "train" and obj["label"] != "normal":
            raise ValidationError(
                f"line {line_number}: train video '{obj['path']}' labeled "
                f"'{obj['label']}'; the train split must be normal-only"
            )
        video_id = obj.get("video_id") or Path(obj["path"]).stem
        if video_id in seen:
            raise ValidationError(f"line {line_number}: duplicate video_id '{video_id}'")
        seen.add(video_id)
        video_path = Path(obj["path"])
        if not video_path.is_absolute():
            video_path = path.parent / video_path
        rows.append(
            {
                "video_id": video_id,
                "path": video_path,
                "class_name": obj["class_name"],
                "split": obj["split"],
                "label": obj["label"],
            }
        )
    if not rows:
        raise ValidationError(f"{path}: video list is empty")
    return rows


def extract_manifest(
    rows: list[dict],
    spec: ExtractorSpec,
    out_dir,
    allow_partial: bool = False,
) -> tuple[Path, list[dict], list[tuple[str, str]]]:
    """Extract every listed video into ``out_dir`` and write a manifest.

    Without ``allow_partial`` any failure aborts the batch and no manifest is
    written; with it, failures are logged and the manifest covers the
    successes.  Returns (manifest_path, manifest_rows, failures).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    backbone = load_backbone(spec)

    manifest_rows: list[dict] = []
    failures: list[tuple[str, str]] = []
    for row in rows:
        emb_name = f"{row['video_id']}.emb"
        try:
            extract(row["path"], spec, out_dir / emb_name, backbone=backbone)
        except ExtractError as exc:
            failures.append((row["video_id"], str(exc)))
            continue
        manifest_rows.append(
            {
                "video_id": row["video_id"],
                "class_name": row["class_name"],
                "split": row["split"],
                "label": row["label"],
                "path": emb_name,
            }
        )

    if failures and not allow_partial:
        raise BatchError(failures)
    if not manifest_rows:
        raise BatchError(failures)
    for video_id, message in failures:
        log.warning("skipped %s: %s", video_id, message)
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(manifest_path, manifest_rows)
    return manifest_path, manifest_rows, failures
