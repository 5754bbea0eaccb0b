"""
Dense complex linear algebra: inner products, norms and the Cartesian FFT.

FFT convention (fixed project-wide): the forward transform uses
exp(-2i*pi*...) without scaling; the inverse carries 1/(H*W). Hence
||fft2(x, FORWARD)||^2 = H*W * ||x||^2.
"""

from enum import Enum
from typing import Union

import numpy as np
import scipy.fft

from .exceptions import DimensionError
from .types import ComplexImage, KSpaceSamples

VectorLike = Union[np.ndarray, ComplexImage, KSpaceSamples]


class FFTDirection(str, Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


def as_vector(value: VectorLike) -> np.ndarray:
    """Flatten any supported container to a 1D complex array view."""
    if isinstance(value, ComplexImage):
        return value.data.ravel()
    if isinstance(value, KSpaceSamples):
        return value.values
    return np.asarray(value).ravel()


def inner_product(a: VectorLike, b: VectorLike) -> complex:
    """
    Complex inner product sum_i a_i * conj(b_i).

    Raises:
        DimensionError: If lengths differ
    """
    va, vb = as_vector(a), as_vector(b)
    if va.shape != vb.shape:
        raise DimensionError(f"inner product of lengths {va.size} and {vb.size}")
    return complex(np.vdot(vb, va))


def norm(a: VectorLike) -> float:
    """Euclidean norm."""
    return float(np.linalg.norm(as_vector(a)))


def fft2_array(data: np.ndarray, direction: FFTDirection, workers: int = 1) -> np.ndarray:
    """FFT over the last two axes of a raw array."""
    if FFTDirection(direction) is FFTDirection.FORWARD:
        return scipy.fft.fft2(data, norm="backward", workers=workers)
    return scipy.fft.ifft2(data, norm="backward", workers=workers)


def fft2(img: ComplexImage, direction: FFTDirection, workers: int = 1) -> ComplexImage:
    """
    Cartesian 2D DFT of an image.

    Args:
        img: Input image
        direction: FORWARD (unscaled) or INVERSE (scaled by 1/(H*W))
        workers: FFT threads; results do not depend on it

    Returns:
        Transformed image, same shape, natural (unshifted) frequency order
    """
    return ComplexImage(fft2_array(img.data, direction, workers))


def centered_coordinates(n: int) -> np.ndarray:
    """Pixel coordinates n - floor(N/2), so index N//2 sits at the origin."""
    return np.arange(n, dtype=np.float64) - (n // 2)
