"""Feature extraction from videos into the anomaly-detection engine's file formats."""

__version__ = "0.1.0"

from .backbones import (
    BACKBONES,
    IMAGE_BACKBONES,
    VIDEO_BACKBONES,
    Backbone,
    ExtractorSpec,
    load_backbone,
    preprocess_frames,
)
from .emb_format import write_embedding_file, write_manifest, write_sidecar
from .errors import BatchError, DecodeError, ExtractError, SetupError, ValidationError
from .extract import extract, extract_manifest, read_video_list
from .video import count_frames, even_sample_indices, read_frames

__all__ = [
    "BACKBONES",
    "Backbone",
    "BatchError",
    "DecodeError",
    "ExtractError",
    "ExtractorSpec",
    "IMAGE_BACKBONES",
    "SetupError",
    "VIDEO_BACKBONES",
    "ValidationError",
    "count_frames",
    "even_sample_indices",
    "extract",
    "extract_manifest",
    "load_backbone",
    "preprocess_frames",
    "read_frames",
    "read_video_list",
    "write_embedding_file",
    "write_manifest",
    "write_sidecar",
]
