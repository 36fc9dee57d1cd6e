"""ROCAUC evaluation and per-class report rendering.

The metric equals the Mann-Whitney statistic: the probability that a
randomly chosen anomalous record outscores a randomly chosen normal one,
ties counted half.  Computed via rank-sums with tie averaging in
O(n log n); the exhaustive pair count lives in the tests as the oracle.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError, UndefinedMetricError, ValidationError
from .scoring import ScoreRecord


@dataclass(frozen=True)
class RocReport:
    per_class: dict[str, float]
    average: float
    counts: dict[str, tuple[int, int]]  # class -> (normal, anomalous) test counts


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks, tied values receiving the mean of their rank range."""
    n = scores.shape[0]
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    change = np.flatnonzero(np.diff(sorted_scores)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [n]))
    group_rank = (starts + ends + 1) / 2.0  # mean of 1-based ranks start+1 .. end
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(group_rank, ends - starts)
    return ranks


def rocauc(records: Sequence[ScoreRecord]) -> float:
    """ROCAUC of the records, anomalous being the positive class."""
    scores = np.asarray([r.score for r in records], dtype=np.float64)
    if scores.size and not np.isfinite(scores).all():
        raise ValidationError("scores must be finite")
    positive = np.asarray([r.label == "anomalous" for r in records], dtype=bool)
    n_pos = int(positive.sum())
    n_neg = int(scores.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(
            f"ROCAUC needs both labels, got {n_neg} normal and {n_pos} anomalous records"
        )
    ranks = _average_ranks(scores)
    rank_sum = float(ranks[positive].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def build_report(records: Sequence[ScoreRecord]) -> RocReport:
    """Per-class ROCAUC plus the unweighted mean across classes."""
    if not records:
        raise ContractError("cannot build a report from zero records")
    by_class: dict[str, list[ScoreRecord]] = {}
    for record in records:
        by_class.setdefault(record.class_name, []).append(record)

    per_class: dict[str, float] = {}
    counts: dict[str, tuple[int, int]] = {}
    for name in sorted(by_class):
        group = by_class[name]
        try:
            per_class[name] = rocauc(group)
        except UndefinedMetricError as exc:
            raise UndefinedMetricError(f"class '{name}': {exc}") from exc
        normal = sum(1 for r in group if r.label == "normal")
        counts[name] = (normal, len(group) - normal)
    average = sum(per_class.values()) / len(per_class)
    return RocReport(per_class=per_class, average=average, counts=counts)


def render_report(report: RocReport, fmt: str = "table") -> str:
    """Render deterministically; classes sorted lexicographically, Average row last."""
    names = sorted(report.per_class)
    total_normal = sum(report.counts[n][0] for n in names)
    total_anomalous = sum(report.counts[n][1] for n in names)

    if fmt == "table":
        width = max(len("Average"), len("Class"), *(len(n) for n in names))
        lines = [f"{'Class':<{width}}  ROCAUC  Normal  Anomalous"]
        for name in names:
            normal, anomalous = report.counts[name]
            lines.append(
                f"{name:<{width}}  {report.per_class[name]:>6.2f}  {normal:>6d}  {anomalous:>9d}"
            )
        lines.append(
            f"{'Average':<{width}}  {report.average:>6.2f}  {total_normal:>6d}  {total_anomalous:>9d}"
        )
        return "\n".join(lines) + "\n"

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["class", "rocauc", "normal", "anomalous"])
        for name in names:
            normal, anomalous = report.counts[name]
            writer.writerow([name, repr(report.per_class[name]), normal, anomalous])
        writer.writerow(["Average", repr(report.average), total_normal, total_anomalous])
        return buf.getvalue()

    if fmt == "json":
        payload = {
            "per_class": {n: report.per_class[n] for n in names},
            "counts": {
                n: {"normal": report.counts[n][0], "anomalous": report.counts[n][1]}
                for n in names
            },
            "average": report.average,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    raise ContractError(f"unknown report format '{fmt}'")
