import json
from pathlib import Path

import numpy as np
import pytest

from vad import EmbeddingMatrix, write_embedding


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and getattr(report, "when", "call") == "call":
                lines.append((nodeid.split("::")[-1], outcome.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in lines:
            terminalreporter.write_line(f"{name}: {outcome}")


@pytest.fixture
def dataset_factory(tmp_path):
    """Build an on-disk dataset: embedding files plus a JSON-lines manifest.

    Rows are (video_id, class_name, split, label, data); returns the manifest
    path.  Embedding files live next to the manifest as <video_id>.emb.
    """

    def build(rows, subdir="dataset", manifest_name="manifest.jsonl"):
        root = tmp_path / subdir
        root.mkdir(parents=True, exist_ok=True)
        lines = []
        for video_id, class_name, split, label, data in rows:
            rel = f"{video_id}.emb"
            write_embedding(EmbeddingMatrix(video_id, np.asarray(data)), root / rel)
            lines.append(
                json.dumps(
                    {
                        "video_id": video_id,
                        "class_name": class_name,
                        "split": split,
                        "label": label,
                        "path": rel,
                    }
                )
            )
        manifest = root / manifest_name
        manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return manifest

    return build


def kahan_mean(rows: np.ndarray) -> np.ndarray:
    """Compensated-summation column means; the high-precision pooling oracle."""
    total = np.zeros(rows.shape[1], dtype=np.float64)
    compensation = np.zeros(rows.shape[1], dtype=np.float64)
    for row in rows.astype(np.float64):
        y = row - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
    return total / rows.shape[0]


def brute_knn_score(vectors: np.ndarray, query: np.ndarray, k: int) -> float:
    """Oracle for the kNN score: all N squared distances, full sort, mean of first k'."""
    diffs = vectors.astype(np.float64) - np.asarray(query, dtype=np.float64)
    distances = np.sort((diffs * diffs).sum(axis=1))
    return float(distances[: min(k, len(distances))].mean())


def pair_count_auc(scores, labels) -> float:
    """Oracle for ROCAUC: exhaustive O(n^2) pair count with half-credit ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    anomalous = scores[labels]
    normal = scores[~labels]
    wins = (anomalous[:, None] > normal[None, :]).sum()
    ties = (anomalous[:, None] == normal[None, :]).sum()
    return (wins + 0.5 * ties) / (len(anomalous) * len(normal))


def membership_frame_scores(frame_count, windows, window_scores) -> np.ndarray:
    """Oracle for frame scores: recount window membership per frame, then mean."""
    out = np.empty(frame_count, dtype=np.float64)
    for frame in range(frame_count):
        covering = [
            window_scores[i]
            for i, (start, end) in enumerate(windows)
            if start <= frame < end
        ]
        total = 0.0
        for value in covering:
            total += value
        out[frame] = total / len(covering)
    return out
