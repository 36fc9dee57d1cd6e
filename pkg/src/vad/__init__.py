"""Video anomaly detection by k-nearest-neighbor distance over pooled embeddings."""

__version__ = "0.1.0"

from .embedding_io import (
    DatasetManifest,
    EmbeddingMatrix,
    ManifestEntry,
    load_manifest,
    read_embedding,
    write_embedding,
    write_manifest,
)
from .errors import (
    ClassLookupError,
    ContractError,
    CorruptionError,
    FormatError,
    ManifestParseError,
    ProtocolError,
    StorageError,
    UndefinedMetricError,
    VadError,
    ValidationError,
)
from .evaluation import RocReport, build_report, render_report, rocauc
from .knn import KnnScore, TrainIndex, build_index, score, score_batch
from .pooling import PoolingMode, even_sample_indices, pool, pool_rows
from .scoring import (
    Decision,
    ScoreRecord,
    decide,
    read_score_records,
    run_class,
    write_score_records,
)
from .windows import (
    FrameScoreSeries,
    WindowConfig,
    build_window_index,
    enumerate_windows,
    read_frame_scores,
    score_frames,
    write_frame_scores,
)

__all__ = [
    "ClassLookupError",
    "ContractError",
    "CorruptionError",
    "DatasetManifest",
    "Decision",
    "EmbeddingMatrix",
    "FormatError",
    "FrameScoreSeries",
    "KnnScore",
    "ManifestEntry",
    "ManifestParseError",
    "PoolingMode",
    "ProtocolError",
    "RocReport",
    "ScoreRecord",
    "StorageError",
    "TrainIndex",
    "UndefinedMetricError",
    "VadError",
    "ValidationError",
    "WindowConfig",
    "build_index",
    "build_report",
    "build_window_index",
    "decide",
    "enumerate_windows",
    "even_sample_indices",
    "load_manifest",
    "pool",
    "pool_rows",
    "read_embedding",
    "read_frame_scores",
    "read_score_records",
    "render_report",
    "rocauc",
    "run_class",
    "score",
    "score_batch",
    "score_frames",
    "write_embedding",
    "write_frame_scores",
    "write_manifest",
    "write_score_records",
]
