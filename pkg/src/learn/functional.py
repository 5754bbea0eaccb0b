"""
Array kernels shared by the correction networks and their gradients.

Images with channels are (C, H, W) arrays. Convolutions are 2D
cross-correlations with zero padding that keeps H and W.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _windows(x: np.ndarray, kernel_size: int) -> np.ndarray:
    pad = kernel_size // 2
    padded = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    return sliding_window_view(padded, (kernel_size, kernel_size), axis=(1, 2))


def conv2d(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """
    Same-size 2D cross-correlation.

    Args:
        x: (C_in, H, W)
        weight: (C_out, C_in, k, k), k odd
        bias: (C_out,)

    Returns:
        (C_out, H, W)
    """
    windows = _windows(x, weight.shape[-1])
    return np.einsum("chwij,ocij->ohw", windows, weight) + bias[:, None, None]


def conv2d_input_grad(grad: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Cotangent of conv2d's input: correlation with the flipped, transposed kernel."""
    flipped = weight.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1]
    return conv2d(grad, flipped, np.zeros(flipped.shape[0]))


def conv2d_weight_grad(grad: np.ndarray, x: np.ndarray, kernel_size: int) -> np.ndarray:
    """Cotangent of conv2d's weight, shape (C_out, C_in, k, k)."""
    return np.einsum("ohw,chwij->ocij", grad, _windows(x, kernel_size))


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def complex_to_channels(z: np.ndarray) -> np.ndarray:
    """(B, H, W) complex -> (2B, H, W) real as [Re z0, Im z0, Re z1, ...]."""
    out = np.empty((2 * z.shape[0],) + z.shape[1:], dtype=np.float64)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def channels_to_complex(r: np.ndarray) -> np.ndarray:
    """Inverse of complex_to_channels."""
    return r[0::2] + 1j * r[1::2]
