"""Command-line interface: ``vad validate``, ``vad score``, ``vad report``.

Exit codes: 0 success, 1 data/protocol error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .embedding_io import load_manifest, parse_manifest_lines, read_embedding
from .errors import ClassLookupError, StorageError, VadError
from .evaluation import build_report, render_report
from .pooling import PoolingMode
from .scoring import run_class, write_score_records, read_score_records
from .windows import WindowConfig, build_window_index, score_frames, write_frame_scores


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{text}'") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("VAD_THREADS", "").strip()
    if env.isdigit() and int(env) >= 1:
        return int(env)
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vad",
        description="Video anomaly detection via k-nearest-neighbor distances "
        "over pooled embeddings.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser(
        "validate", help="check a manifest and every embedding file it references"
    )
    p_validate.add_argument("manifest", type=Path)

    p_score = sub.add_parser("score", help="score test videos against the train set")
    p_score.add_argument("manifest", type=Path)
    p_score.add_argument("-o", "--out", type=Path, default=Path("scores.jsonl"))
    p_score.add_argument(
        "--class",
        dest="classes",
        action="append",
        metavar="NAME",
        help="restrict to this class (repeatable; default: all classes)",
    )
    p_score.add_argument(
        "--pooling",
        choices=["avg", "max", "identity"],
        default="avg",
        help="temporal pooling operator (default: avg)",
    )
    p_score.add_argument(
        "--k", type=_positive_int, default=2, help="neighbor count (default: 2)"
    )
    p_score.add_argument(
        "--normalize", action="store_true", help="L2-normalize pooled vectors"
    )
    p_score.add_argument(
        "--frames",
        type=_positive_int,
        default=None,
        help="evenly resample each embedding to at most this many frames before "
        "pooling (default: use all frames)",
    )
    p_score.add_argument(
        "--window", action="store_true", help="per-frame scoring via overlapping windows"
    )
    p_score.add_argument(
        "--window-len",
        type=_positive_int,
        default=None,
        help="window length in frames (default: 16; requires --window)",
    )
    p_score.add_argument(
        "--window-stride",
        type=_positive_int,
        default=None,
        help="window stride in frames (default: 1; requires --window)",
    )
    p_score.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="query parallelism (default: $VAD_THREADS or the CPU count)",
    )

    p_report = sub.add_parser("report", help="per-class ROCAUC report from a scores file")
    p_report.add_argument("scores", type=Path)
    p_report.add_argument(
        "--format", choices=["table", "csv", "json"], default="table"
    )
    return parser


def cmd_validate(args) -> int:
    try:
        text = args.manifest.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"vad: cannot read manifest: {exc}", file=sys.stderr)
        return 1
    try:
        manifest = parse_manifest_lines(text.splitlines(), args.manifest.parent)
    except VadError as exc:
        print(f"vad: invalid manifest: {exc}", file=sys.stderr)
        return 1

    problems = []
    dims: int | None = None
    dims_owner = ""
    for entry in manifest.entries:
        try:
            matrix = read_embedding(entry.path, entry.video_id)
        except VadError as exc:
            problems.append(f"{entry.video_id}: {exc}")
            continue
        if dims is None:
            dims, dims_owner = matrix.dims, entry.video_id
        elif matrix.dims != dims:
            problems.append(
                f"{entry.video_id}: dimension {matrix.dims} differs from "
                f"{dims} ('{dims_owner}')"
            )
    if problems:
        for problem in problems:
            print(f"vad: {problem}", file=sys.stderr)
        return 1
    print(f"{len(manifest.entries)} entries OK")
    return 0


def cmd_score(args, parser: argparse.ArgumentParser) -> int:
    if args.window and args.frames is not None:
        parser.error("--frames cannot be combined with --window")
    if not args.window and (args.window_len is not None or args.window_stride is not None):
        parser.error("--window-len/--window-stride require --window")
    window_len = args.window_len if args.window_len is not None else 16
    window_stride = args.window_stride if args.window_stride is not None else 1
    if args.window and window_stride > window_len:
        parser.error(
            f"--window-stride ({window_stride}) must not exceed --window-len ({window_len})"
        )

    mode = PoolingMode.from_token(args.pooling)
    threads = _resolve_threads(args.threads)
    manifest = load_manifest(args.manifest)
    classes = args.classes if args.classes else manifest.class_names()

    if args.window:
        cfg = WindowConfig(length=window_len, stride=window_stride)
        header = {
            "mode": "window",
            "manifest": str(args.manifest),
            "classes": classes,
            "pooling": mode.value,
            "k": args.k,
            "normalize": args.normalize,
            "window_length": cfg.length,
            "window_stride": cfg.stride,
        }
        series = []
        for class_name in classes:
            train = manifest.entries_for(class_name, "train")
            test = manifest.entries_for(class_name, "test")
            if not train or not test:
                raise ClassLookupError(
                    f"class '{class_name}' needs both train and test entries"
                )
            train_matrices = [read_embedding(e.path, e.video_id) for e in train]
            index = build_window_index(train_matrices, cfg, mode, normalize=args.normalize)
            for entry in test:
                video = read_embedding(entry.path, entry.video_id)
                series.append(score_frames(index, video, cfg, mode, args.k, threads=threads))
        write_frame_scores(args.out, header, series)
        total = sum(len(s.scores) for s in series)
        print(f"wrote {total} frame scores for {len(series)} videos to {args.out}")
        return 0

    header = {
        "mode": "video",
        "manifest": str(args.manifest),
        "classes": classes,
        "pooling": mode.value,
        "k": args.k,
        "normalize": args.normalize,
        "frames": args.frames,
    }
    records = []
    for class_name in classes:
        records.extend(
            run_class(
                manifest,
                class_name,
                mode,
                args.k,
                normalize=args.normalize,
                frames=args.frames,
                threads=threads,
            )
        )
    write_score_records(args.out, header, records)
    print(f"wrote {len(records)} score records to {args.out}")
    return 0


def cmd_report(args) -> int:
    _, records = read_score_records(args.scores)
    if not records:
        raise StorageError(f"scores file {args.scores} contains no records")
    report = build_report(records)
    sys.stdout.write(render_report(report, args.format))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "score":
            return cmd_score(args, parser)
        if args.command == "report":
            return cmd_report(args)
    except VadError as exc:
        print(f"vad: error [{args.command}]: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
