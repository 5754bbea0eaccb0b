"""
Exceptions for the reconstruction toolkit.

Every module raises a subclass of ReconError so callers (the CLI in
particular) can separate domain failures from programming errors.
"""

from typing import Optional


class ReconError(Exception):
    """Base exception for reconstruction errors."""
    pass


class DimensionError(ReconError):
    """Vector lengths or image shapes do not match."""
    pass


class DomainError(ReconError):
    """A k-space coordinate lies outside [-0.5, 0.5)."""

    def __init__(self, message: str, index: Optional[int] = None, line: Optional[int] = None):
        super().__init__(message)
        self.index = index
        self.line = line


class ParameterError(ReconError):
    """An algorithm parameter is out of its valid range."""
    pass


class SingularityError(ReconError):
    """Pipe-Menon denominator vanished at a sample."""

    def __init__(self, message: str, sample_index: int):
        super().__init__(message)
        self.sample_index = sample_index


class DegenerateInputError(ReconError):
    """Input carries no signal where a normalization needs one."""
    pass


class ScaleError(ReconError):
    """Image too small for the requested window or number of scales."""
    pass


class FormatError(ReconError):
    """Malformed binary or text file."""

    def __init__(self, message: str, offset: Optional[int] = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class TapeError(ReconError):
    """Gradient tape misuse: consumed twice or bad cotangent shape."""
    pass


class TrainingError(ReconError):
    """Error during training."""

    def __init__(self, message: str, parameter_index: Optional[int] = None):
        super().__init__(message)
        self.parameter_index = parameter_index


class ConfigurationError(ReconError):
    """Invalid or unknown configuration."""
    pass
