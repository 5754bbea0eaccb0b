"""Exact non-uniform DFT by direct summation. Reference for the gridding NUFFT."""

from typing import Tuple

import numpy as np

from src.core.constants import NDFT_CHUNK_SIZE
from src.core.exceptions import DimensionError
from src.core.linalg import centered_coordinates
from src.core.types import ComplexImage, KSpaceSamples, Trajectory


def _phases(points: np.ndarray, shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    """Separable factors exp(-2i pi kx r0) and exp(-2i pi ky r1) for a block of samples."""
    rows = np.exp(-2j * np.pi * np.outer(points[:, 0], centered_coordinates(shape[0])))
    cols = np.exp(-2j * np.pi * np.outer(points[:, 1], centered_coordinates(shape[1])))
    return rows, cols


def ndft_forward(img: ComplexImage, traj: Trajectory) -> KSpaceSamples:
    """y_i = sum_n x_n exp(-2i pi k_i . r_n), centered pixel coordinates."""
    values = np.empty(len(traj), dtype=np.complex128)
    for start in range(0, len(traj), NDFT_CHUNK_SIZE):
        stop = min(start + NDFT_CHUNK_SIZE, len(traj))
        rows, cols = _phases(traj.points[start:stop], img.shape)
        values[start:stop] = np.einsum("mh,hw,mw->m", rows, img.data, cols)
    return KSpaceSamples(values)


def ndft_adjoint(y: KSpaceSamples, traj: Trajectory, shape: Tuple[int, int]) -> ComplexImage:
    """x_n = sum_i y_i exp(+2i pi k_i . r_n)."""
    if len(y) != len(traj):
        raise DimensionError(f"received {len(y)} samples for a trajectory of {len(traj)} points")
    height, width = shape
    data = np.zeros((height, width), dtype=np.complex128)
    for start in range(0, len(traj), NDFT_CHUNK_SIZE):
        stop = min(start + NDFT_CHUNK_SIZE, len(traj))
        rows, cols = _phases(traj.points[start:stop], (height, width))
        data += np.einsum("m,mh,mw->hw", y.values[start:stop], rows.conj(), cols.conj())
    return ComplexImage(data)
