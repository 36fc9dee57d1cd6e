class ExtractError(Exception):
    """Base class for expected extraction failures."""


class DecodeError(ExtractError):
    """Video file or frame folder could not be decoded."""


class SetupError(ExtractError):
    """Environment problem: checkpoint unavailable or not loadable."""


class ValidationError(ExtractError):
    """Spec or data violates a contract (bad backbone, non-finite features)."""


class BatchError(ExtractError):
    """One or more videos in a batch failed; carries per-video messages."""

    def __init__(self, failures: list[tuple[str, str]]):
        self.failures = failures
        detail = "; ".join(f"{video}: {message}" for video, message in failures)
        super().__init__(f"{len(failures)} video(s) failed: {detail}")
