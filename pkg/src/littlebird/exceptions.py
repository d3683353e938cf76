"""Custom exception hierarchy for LittleBird."""

from typing import Any, ClassVar


class LittleBirdError(Exception):
    """Base exception for all LittleBird errors."""

    code: ClassVar[str] = "ERROR"

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context


class DimensionError(LittleBirdError):
    """Tensor shapes are inconsistent for the requested operation."""

    code = "DIMENSION"


class NumericError(LittleBirdError):
    """NaN or non-finite values where finite numbers are required."""

    code = "NUMERIC"


class InputError(LittleBirdError):
    """Invalid user-supplied data: position ids, token ids, span positions."""

    code = "INPUT"


class ConfigurationError(LittleBirdError):
    """Error in configuration, settings or model pairing."""

    code = "CONFIG"


class CheckpointError(LittleBirdError):
    """Error reading or writing a parameter checkpoint."""

    code = "CHECKPOINT_IO"


class ArtifactIOError(LittleBirdError):
    """Error reading a corpus or writing benchmark / heatmap artifacts."""

    code = "ARTIFACT_IO"


class OutOfMemoryError(LittleBirdError):
    """A benchmark cell exhausted memory."""

    code = "OOM"


class CheckFailedError(LittleBirdError):
    """An oracle suite reported a failure."""

    code = "CHECK_FAILED"
