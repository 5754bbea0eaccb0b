"""
Domain value types shared by every module.

All types are immutable after construction: arrays are copied to
double precision and flagged read-only, and invariants are checked in
``__post_init__``. They are safe to share between threads.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DimensionError, DomainError, ParameterError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class ComplexImage:
    """
    Complex-valued 2D image, row-major.

    Attributes:
        data: complex128 array of shape (height, width)
    """
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise DimensionError(f"image data must be 2D, received shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise DimensionError(f"image dimensions must be positive, received {data.shape}")
        data = data.astype(np.complex128, copy=False)
        if not np.isfinite(data).all():
            raise ParameterError("image contains non-finite values")
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def from_flat(cls, height: int, width: int, values) -> "ComplexImage":
        values = np.asarray(values)
        if values.size != height * width:
            raise DimensionError(
                f"expected {height * width} values for a {height}x{width} image, "
                f"received {values.size}"
            )
        return cls(values.reshape(height, width))

    @classmethod
    def zeros(cls, height: int, width: int) -> "ComplexImage":
        return cls(np.zeros((height, width), dtype=np.complex128))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def magnitude(self) -> np.ndarray:
        return np.abs(self.data)


@dataclass(frozen=True, eq=False)
class KSpaceSamples:
    """Complex measurements aligned with a Trajectory."""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise DimensionError(f"k-space samples must be 1D, received shape {values.shape}")
        values = values.astype(np.complex128, copy=False)
        if not np.isfinite(values).all():
            raise ParameterError("k-space samples contain non-finite values")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def zeros(cls, n_samples: int) -> "KSpaceSamples":
        return cls(np.zeros(n_samples, dtype=np.complex128))

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Normalized 2D k-space sample locations.

    Attributes:
        points: float64 array (M, 2) of (kx, ky) in [-0.5, 0.5).
            kx runs along image axis 0 (rows), ky along axis 1.
    """
    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise DimensionError(f"trajectory must have shape (M, 2), received {points.shape}")
        if points.shape[0] < 1:
            raise DimensionError("trajectory needs at least one point")
        bad = ~(np.isfinite(points) & (points >= -0.5) & (points < 0.5))
        if bad.any():
            index = int(np.argmax(bad.any(axis=1)))
            raise DomainError(
                f"trajectory point {index} {tuple(points[index])} outside [-0.5, 0.5)",
                index=index,
            )
        object.__setattr__(self, "points", _frozen(points))

    @property
    def kx(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def ky(self) -> np.ndarray:
        return self.points[:, 1]

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class DcWeights:
    """Strictly positive density-compensation weights, one per sample."""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise DimensionError(f"DC weights must be 1D, received shape {values.shape}")
        if not (np.isfinite(values).all() and (values > 0).all()):
            raise ParameterError("DC weights must be strictly positive and finite")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def ones(cls, n_samples: int) -> "DcWeights":
        return cls(np.ones(n_samples))

    def __len__(self) -> int:
        return self.values.shape[0]
