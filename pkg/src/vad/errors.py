"""Exception hierarchy shared by the whole package.

Every error raised on purpose derives from VadError so the CLI can map
failures to exit code 1 while genuine bugs still crash loudly.
"""


class VadError(Exception):
    """Base class for all expected failures."""


class StorageError(VadError):
    """Underlying I/O failed (missing file, permission, short write)."""


class FormatError(VadError):
    """File is not an embedding file: bad magic or unsupported version."""


class CorruptionError(VadError):
    """Embedding file is structurally damaged (truncated, length mismatch)."""


class ValidationError(VadError):
    """Data violates an invariant (non-finite values, bad shapes, duplicate ids)."""


class ProtocolError(VadError):
    """Dataset protocol violation: an anomalous video in the train split."""


class ManifestParseError(VadError):
    """A manifest or scores line could not be parsed."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ContractError(VadError):
    """Caller violated an operation precondition (dimension mismatch, bad k)."""


class ClassLookupError(VadError):
    """Requested class is absent from the manifest or has no usable entries."""


class UndefinedMetricError(VadError):
    """ROCAUC is undefined: records contain only one label."""
