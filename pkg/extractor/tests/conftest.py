import json

import cv2
import numpy as np
import pytest
import torch

from vad_extract import ExtractorSpec, load_backbone


def synth_frame(index, width=80, height=64):
    """A deterministic RGB frame whose content depends on the frame index."""
    y = np.linspace(0, 255, height, dtype=np.uint8)[:, None]
    x = np.linspace(0, 255, width, dtype=np.uint8)[None, :]
    frame = np.zeros((height, width, 3), dtype=np.uint8)
    frame[..., 0] = y
    frame[..., 1] = x
    frame[..., 2] = (index * 23) % 256
    return frame


@pytest.fixture
def make_avi(tmp_path):
    def build(name="clip.avi", frames=12, width=80, height=64):
        path = tmp_path / name
        writer = cv2.VideoWriter(
            str(path), cv2.VideoWriter_fourcc(*"MJPG"), 10.0, (width, height)
        )
        assert writer.isOpened()
        for i in range(frames):
            writer.write(cv2.cvtColor(synth_frame(i, width, height), cv2.COLOR_RGB2BGR))
        writer.release()
        return path

    return build


@pytest.fixture
def make_frame_folder(tmp_path):
    def build(name="frames", frames=10, width=80, height=64):
        folder = tmp_path / name
        folder.mkdir()
        for i in range(frames):
            cv2.imwrite(
                str(folder / f"{i:04d}.png"),
                cv2.cvtColor(synth_frame(i, width, height), cv2.COLOR_RGB2BGR),
            )
        return folder

    return build


@pytest.fixture
def make_video_list(tmp_path):
    def build(entries, name="videos.jsonl"):
        path = tmp_path / name
        path.write_text("".join(json.dumps(e) + "\n" for e in entries), encoding="utf-8")
        return path

    return build


TINY_RESNET = ExtractorSpec("image-resnet", frames=4, resolution=64, checkpoint="untrained-tiny")
TINY_VIT = ExtractorSpec("image-vit", frames=4, resolution=64, checkpoint="untrained-tiny")
TINY_TSF = ExtractorSpec(
    "video-timesformer", frames=4, resolution=64, checkpoint="untrained-tiny"
)


@pytest.fixture(scope="session")
def tiny_resnet():
    return load_backbone(TINY_RESNET)


@pytest.fixture(scope="session")
def tiny_timesformer():
    return load_backbone(TINY_TSF)


class ClipMeanNet(torch.nn.Module):
    """Stand-in video-classification trunk: one linear layer over frame-mean channels."""

    def __init__(self):
        super().__init__()
        self.proj = torch.nn.Linear(3, 6)

    def forward(self, clip: torch.Tensor) -> torch.Tensor:
        # clip: (1, F, 3, H, W) -> channel means -> (1, 6)
        pooled = clip.mean(dim=(1, 3, 4))
        return self.proj(pooled)


@pytest.fixture
def torchscript_checkpoint(tmp_path):
    torch.manual_seed(7)
    module = torch.jit.script(ClipMeanNet().eval())
    path = tmp_path / "blvnet_standin.pt"
    module.save(str(path))
    return path
