"""Backbone registry: pretrained image/video networks exposed as feature extractors.

Each backbone maps preprocessed pixels to its penultimate-layer (pre-classifier)
features.  Image backbones take an (F, 3, H, W) batch of frames and return
an (F, D) matrix; video backbones take one (1, F, 3, H, W) clip and return
a single (1, D) vector.

Checkpoint identifiers:

* ``pretrained``       published weights for the canonical architecture
                       (requires network access to the usual model hubs)
* ``untrained``        canonical architecture, seeded random weights
* ``untrained-tiny``   reduced architecture, seeded random weights (fast tests)
* a ``.pt``/``.pts`` file path: a TorchScript module with the matching
  signature; this is the only form supported for ``video-blvnet-class``,
  which has no hub distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import torch

from .errors import SetupError, ValidationError

IMAGE_BACKBONES = ("image-resnet", "image-vit")
VIDEO_BACKBONES = ("video-timesformer", "video-blvnet-class")
BACKBONES = IMAGE_BACKBONES + VIDEO_BACKBONES

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

_WEIGHT_SEED = 0  # fixed init for the untrained modes keeps runs reproducible


@dataclass(frozen=True)
class ExtractorSpec:
    backbone: str
    frames: int = 16
    resolution: int = 224
    checkpoint: str = "pretrained"

    def validate(self) -> None:
        if self.backbone not in BACKBONES:
            raise ValidationError(
                f"unknown backbone '{self.backbone}'; supported: {', '.join(BACKBONES)}"
            )
        if self.frames < 1:
            raise ValidationError(f"frames must be >= 1, got {self.frames}")
        if self.resolution < 16:
            raise ValidationError(f"resolution must be >= 16, got {self.resolution}")

    @property
    def is_video(self) -> bool:
        return self.backbone in VIDEO_BACKBONES


@dataclass
class Backbone:
    """A loaded feature extractor plus the metadata recorded in sidecars."""

    name: str
    is_video: bool
    clip_frames: int | None  # exact clip length a video backbone expects
    forward: Callable[[torch.Tensor], torch.Tensor]
    architecture: str
    checkpoint: str

    def extract_features(self, tensor: torch.Tensor) -> np.ndarray:
        with torch.inference_mode():
            out = self.forward(tensor)
        features = out.detach().cpu().numpy().astype(np.float32)
        if features.ndim == 1:
            features = features[None, :]
        if not np.isfinite(features).all():
            raise ValidationError(f"{self.name} produced non-finite features")
        return features


def preprocess_frames(frames_rgb: list[np.ndarray], resolution: int) -> torch.Tensor:
    """RGB uint8 frames -> (F, 3, R, R) float tensor, eval-recipe normalized.

    Shorter side resized to ~256/224 of the target, center crop, ImageNet
    mean/std normalization.
    """
    import cv2

    resize_to = max(resolution, round(resolution * 256 / 224))
    out = np.empty((len(frames_rgb), 3, resolution, resolution), dtype=np.float32)
    mean = np.asarray(IMAGENET_MEAN, dtype=np.float32).reshape(3, 1, 1)
    std = np.asarray(IMAGENET_STD, dtype=np.float32).reshape(3, 1, 1)
    for i, frame in enumerate(frames_rgb):
        h, w = frame.shape[:2]
        scale = resize_to / min(h, w)
        new_w, new_h = max(resolution, round(w * scale)), max(resolution, round(h * scale))
        resized = cv2.resize(frame, (new_w, new_h), interpolation=cv2.INTER_LINEAR)
        top = (new_h - resolution) // 2
        left = (new_w - resolution) // 2
        crop = resized[top : top + resolution, left : left + resolution]
        chw = crop.astype(np.float32).transpose(2, 0, 1) / 255.0
        out[i] = (chw - mean) / std
    return torch.from_numpy(out)


def _load_torchscript(path: str):
    script_path = Path(path)
    if not script_path.is_file():
        raise SetupError(f"TorchScript checkpoint {script_path} does not exist")
    try:
        module = torch.jit.load(str(script_path), map_location="cpu")
    except Exception as exc:
        raise SetupError(f"cannot load TorchScript checkpoint {script_path}: {exc}") from exc
    module.eval()
    return module


def _fetch(description: str, loader):
    try:
        return loader()
    except (SetupError, ValidationError):
        raise
    except Exception as exc:
        raise SetupError(f"cannot fetch {description}: {exc}") from exc


def _load_image_resnet(spec: ExtractorSpec):
    from torchvision.models import resnet18, resnet50

    if spec.checkpoint == "pretrained":
        from torchvision.models import ResNet50_Weights

        model = _fetch(
            "torchvision resnet50 ImageNet weights",
            lambda: resnet50(weights=ResNet50_Weights.DEFAULT),
        )
        arch = "resnet50"
    elif spec.checkpoint == "untrained":
        torch.manual_seed(_WEIGHT_SEED)
        model, arch = resnet50(weights=None), "resnet50"
    elif spec.checkpoint == "untrained-tiny":
        torch.manual_seed(_WEIGHT_SEED)
        model, arch = resnet18(weights=None), "resnet18"
    else:
        raise SetupError(
            f"image-resnet supports checkpoints pretrained|untrained|untrained-tiny, "
            f"got '{spec.checkpoint}'"
        )
    model.fc = torch.nn.Identity()
    model.eval()
    return model, arch


def _load_image_vit(spec: ExtractorSpec):
    from torchvision.models import vit_b_16
    from torchvision.models.vision_transformer import VisionTransformer

    if spec.resolution % 16 != 0:
        raise ValidationError(f"ViT needs resolution divisible by 16, got {spec.resolution}")
    if spec.checkpoint == "pretrained":
        from torchvision.models import ViT_B_16_Weights

        if spec.resolution != 224:
            raise ValidationError("pretrained ViT-B/16 requires resolution 224")
        model = _fetch(
            "torchvision ViT-B/16 ImageNet weights",
            lambda: vit_b_16(weights=ViT_B_16_Weights.DEFAULT),
        )
        arch = "vit_b_16"
    elif spec.checkpoint == "untrained":
        if spec.resolution != 224:
            raise ValidationError("canonical ViT-B/16 requires resolution 224")
        torch.manual_seed(_WEIGHT_SEED)
        model, arch = vit_b_16(weights=None), "vit_b_16"
    elif spec.checkpoint == "untrained-tiny":
        torch.manual_seed(_WEIGHT_SEED)
        model = VisionTransformer(
            image_size=spec.resolution,
            patch_size=16,
            num_layers=2,
            num_heads=2,
            hidden_dim=64,
            mlp_dim=128,
        )
        arch = "vit_tiny_2l"
    else:
        raise SetupError(
            f"image-vit supports checkpoints pretrained|untrained|untrained-tiny, "
            f"got '{spec.checkpoint}'"
        )
    model.heads = torch.nn.Identity()
    model.eval()
    return model, arch


def _load_video_timesformer(spec: ExtractorSpec):
    from transformers import TimesformerConfig, TimesformerModel

    if spec.checkpoint == "pretrained":
        model = _fetch(
            "TimeSformer Kinetics-600 weights",
            lambda: TimesformerModel.from_pretrained(
                "facebook/timesformer-base-finetuned-k600"
            ),
        )
        arch = "timesformer-base-k600"
        clip_frames = int(model.config.num_frames)
    elif spec.checkpoint in ("untrained", "untrained-tiny"):
        if spec.resolution % 16 != 0:
            raise ValidationError(
                f"TimeSformer needs resolution divisible by 16, got {spec.resolution}"
            )
        kwargs = dict(image_size=spec.resolution, patch_size=16, num_frames=spec.frames)
        if spec.checkpoint == "untrained-tiny":
            kwargs.update(
                num_hidden_layers=2, num_attention_heads=2, hidden_size=32,
                intermediate_size=64,
            )
            arch = "timesformer_tiny_2l"
        else:
            arch = "timesformer-base"
        torch.manual_seed(_WEIGHT_SEED)
        model = TimesformerModel(TimesformerConfig(**kwargs))
        clip_frames = spec.frames
    else:
        raise SetupError(
            f"video-timesformer supports checkpoints pretrained|untrained|untrained-tiny, "
            f"got '{spec.checkpoint}'"
        )
    model.eval()

    def forward(clip: torch.Tensor) -> torch.Tensor:
        return model(pixel_values=clip).last_hidden_state[:, 0]

    return forward, arch, clip_frames


def load_backbone(spec: ExtractorSpec) -> Backbone:
    """Instantiate the extractor a spec describes; fetch failures become SetupError."""
    spec.validate()
    if spec.backbone == "image-resnet":
        model, arch = _load_image_resnet(spec)
        return Backbone(spec.backbone, False, None, model, arch, spec.checkpoint)
    if spec.backbone == "image-vit":
        model, arch = _load_image_vit(spec)
        return Backbone(spec.backbone, False, None, model, arch, spec.checkpoint)
    if spec.backbone == "video-timesformer":
        forward, arch, clip_frames = _load_video_timesformer(spec)
        return Backbone(spec.backbone, True, clip_frames, forward, arch, spec.checkpoint)
    if spec.backbone == "video-blvnet-class":
        # bLVNet-TAM has no hub distribution; it is consumed as a user-supplied
        # TorchScript module mapping (1, F, 3, H, W) to (1, D) features.
        module = _load_torchscript(spec.checkpoint)

        def forward(clip: torch.Tensor) -> torch.Tensor:
            return module(clip).reshape(1, -1)

        return Backbone(
            spec.backbone, True, spec.frames, forward, "torchscript", spec.checkpoint
        )
    raise ValidationError(f"unknown backbone '{spec.backbone}'")
