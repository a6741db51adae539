"""Exception hierarchy shared by the engine, the tooling and the CLI.

Every class carries the process exit code the CLI maps it to:
1 usage error, 2 I/O error, 3 weight/format error.
"""


class BaeError(Exception):
    """Base class for all engine errors."""

    exit_code: int = 3


# Usage -------------------------------------------------------------------


class UsageError(BaeError):
    exit_code = 1


class InvalidCutoffError(UsageError, ValueError):
    """Cutoff frequency outside (0, Nyquist]."""


class ScheduleError(UsageError, ValueError):
    """Bandwidth schedule empty, unsorted, overlapping or unparsable."""


# I/O ---------------------------------------------------------------------


class AudioIOError(BaeError):
    """Audio or weight file could not be opened or written."""

    exit_code = 2


# Format ------------------------------------------------------------------


class FormatError(BaeError):
    exit_code = 3


class InvalidSignalError(FormatError, ValueError):
    """Signal content violates a precondition (NaN/Inf, silence, bad rate)."""


class SignalTooShortError(InvalidSignalError):
    """Signal shorter than one analysis frame."""


class ShapeMismatchError(FormatError, ValueError):
    """Array dimensions do not match the layer or companion array."""


class AudioFormatError(FormatError):
    """WAV file has an unsupported sample rate, channel count or sample type."""


class WeightFileError(FormatError):
    """Base class for weight-file validation failures."""


class BadMagicError(WeightFileError):
    pass


class UnsupportedVersionError(WeightFileError):
    pass


class TruncatedFileError(WeightFileError):
    pass


class ConfigMismatchError(WeightFileError):
    pass


class MissingTensorError(WeightFileError):
    def __init__(self, name: str):
        super().__init__(f"missing tensor '{name}'")
        self.name = name


class UnexpectedTensorError(WeightFileError):
    def __init__(self, name: str):
        super().__init__(f"unexpected tensor '{name}'")
        self.name = name


class DuplicateTensorError(WeightFileError):
    def __init__(self, name: str):
        super().__init__(f"duplicate tensor '{name}'")
        self.name = name


class TensorShapeError(WeightFileError):
    def __init__(self, name: str, expected: tuple, actual: tuple):
        super().__init__(f"tensor '{name}' has shape {actual}, expected {expected}")
        self.name = name
        self.expected = expected
        self.actual = actual


class NonFiniteTensorError(WeightFileError):
    def __init__(self, name: str):
        super().__init__(f"tensor '{name}' contains NaN or Inf")
        self.name = name


# Streaming ---------------------------------------------------------------


class StreamStateError(BaeError):
    exit_code = 3


class UninitializedStateError(StreamStateError):
    """Stream state has no buffer registered for the requested layer."""


class HopSizeMismatchError(StreamStateError, ValueError):
    """Pushed block length differs from the hop the state was built for."""
