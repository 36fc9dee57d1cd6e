"""``vad-extract``: turn a list of videos into embedding files plus a manifest.

Exit codes: 0 success, 1 extraction/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .backbones import BACKBONES, ExtractorSpec
from .errors import ExtractError
from .extract import extract_manifest, read_video_list


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vad-extract",
        description="Extract embedding files from videos with a pretrained backbone.",
    )
    parser.add_argument("list_file", type=Path, help="JSON-lines video list")
    parser.add_argument("--backbone", required=True, choices=BACKBONES)
    parser.add_argument(
        "--frames", type=_positive_int, default=16, help="frames sampled per video (default: 16)"
    )
    parser.add_argument(
        "--resolution", type=_positive_int, default=224, help="input resolution (default: 224)"
    )
    parser.add_argument(
        "--checkpoint",
        default="pretrained",
        help="pretrained | untrained | untrained-tiny | TorchScript path (default: pretrained)",
    )
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument(
        "--allow-partial",
        action="store_true",
        help="skip undecodable videos instead of aborting the batch",
    )
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="vad-extract: %(message)s")
    args = build_parser().parse_args(argv)
    spec = ExtractorSpec(
        backbone=args.backbone,
        frames=args.frames,
        resolution=args.resolution,
        checkpoint=args.checkpoint,
    )
    try:
        rows = read_video_list(args.list_file)
        manifest_path, written, failures = extract_manifest(
            rows, spec, args.out, allow_partial=args.allow_partial
        )
    except ExtractError as exc:
        print(f"vad-extract: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(written)} embedding file(s) and {manifest_path}")
    if failures:
        print(f"vad-extract: warning: skipped {len(failures)} video(s)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
