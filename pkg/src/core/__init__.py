"""
Core value types, exceptions and dense linear algebra.
"""

from .types import ComplexImage, KSpaceSamples, Trajectory, DcWeights
from .linalg import FFTDirection, inner_product, norm, fft2
from .exceptions import (
    ReconError,
    DimensionError,
    DomainError,
    ParameterError,
    SingularityError,
    DegenerateInputError,
    ScaleError,
    FormatError,
    TapeError,
    TrainingError,
    ConfigurationError,
)

__all__ = [
    # Types
    "ComplexImage",
    "KSpaceSamples",
    "Trajectory",
    "DcWeights",
    # Operations
    "FFTDirection",
    "inner_product",
    "norm",
    "fft2",
    # Exceptions
    "ReconError",
    "DimensionError",
    "DomainError",
    "ParameterError",
    "SingularityError",
    "DegenerateInputError",
    "ScaleError",
    "FormatError",
    "TapeError",
    "TrainingError",
    "ConfigurationError",
]
