"""
Gridding plan: binds a trajectory to an image grid.

The plan holds everything the transforms need and nothing they change:
kernel table, per-sample interpolation taps, the equivalent sparse
interpolation matrix and the deapodization map.
"""

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
import structlog
from scipy import sparse

from src.core.constants import (
    DEFAULT_KERNEL_WIDTH,
    DEFAULT_OVERSAMPLING,
    MIN_OVERSAMPLING,
    NUFFT_NORMS,
)
from src.core.exceptions import DimensionError, ParameterError
from src.core.linalg import centered_coordinates
from src.core.types import Trajectory

from .kernel import KernelSpec, make_kernel

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class NufftPlan:
    """
    Precomputed gridding structure.

    Attributes:
        trajectory: Sample locations
        grid_h: Image height
        grid_w: Image width
        oversampling_sigma: Grid oversampling factor
        kernel: Tabulated interpolation kernel
        oversampled_shape: (K0, K1) oversampled grid size
        interp_indices: (M, J*J) flat indices into the oversampled grid
        interp_weights: (M, J*J) real interpolation weights
        deapod: (grid_h, grid_w) positive deapodization map
        norm: "backward" (raw sums) or "ortho" (scaled by 1/sqrt(H*W))
        workers: FFT worker threads
    """
    trajectory: Trajectory
    grid_h: int
    grid_w: int
    oversampling_sigma: float
    kernel: KernelSpec
    oversampled_shape: Tuple[int, int]
    interp_indices: np.ndarray
    interp_weights: np.ndarray
    deapod: np.ndarray
    norm: str = "backward"
    workers: int = 1
    interp_matrix: sparse.csr_matrix = field(init=False, repr=False)
    interp_matrix_h: sparse.csr_matrix = field(init=False, repr=False)
    row_positions: np.ndarray = field(init=False, repr=False)
    col_positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n_samples = len(self.trajectory)
        k0, k1 = self.oversampled_shape
        if self.interp_indices.shape != self.interp_weights.shape or self.interp_indices.shape[0] != n_samples:
            raise DimensionError(
                f"interpolation tables must be ({n_samples}, J*J), received "
                f"{self.interp_indices.shape} and {self.interp_weights.shape}"
            )
        if self.interp_indices.size and (self.interp_indices.min() < 0 or self.interp_indices.max() >= k0 * k1):
            raise ParameterError("interpolation index outside the oversampled grid")
        if self.deapod.shape != (self.grid_h, self.grid_w) or not (self.deapod > 0).all():
            raise ParameterError("deapodization map must be strictly positive with the grid shape")
        if self.norm not in NUFFT_NORMS:
            raise ParameterError(f"norm must be one of {NUFFT_NORMS}, received {self.norm!r}")

        for name in ("interp_indices", "interp_weights", "deapod"):
            getattr(self, name).flags.writeable = False

        rows = np.repeat(np.arange(n_samples), self.interp_indices.shape[1])
        matrix = sparse.csr_matrix(
            (self.interp_weights.ravel(), (rows, self.interp_indices.ravel())),
            shape=(n_samples, k0 * k1),
        )
        object.__setattr__(self, "interp_matrix", matrix)
        object.__setattr__(self, "interp_matrix_h", matrix.T.tocsr())
        object.__setattr__(self, "row_positions", (centered_coordinates(self.grid_h) % k0).astype(np.int64))
        object.__setattr__(self, "col_positions", (centered_coordinates(self.grid_w) % k1).astype(np.int64))

    @property
    def n_samples(self) -> int:
        return len(self.trajectory)

    @property
    def grid_shape(self) -> Tuple[int, int]:
        return (self.grid_h, self.grid_w)

    @property
    def scale(self) -> float:
        """Factor applied by both forward and adjoint."""
        if self.norm == "ortho":
            return 1.0 / np.sqrt(self.grid_h * self.grid_w)
        return 1.0


def _axis_taps(coords: np.ndarray, size: int, kernel: KernelSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Grid nodes and weights for one axis: nodes m with t - J/2 < m <= t + J/2."""
    t = coords * size
    first = np.floor(t - kernel.half_width).astype(np.int64) + 1
    nodes = first[:, None] + np.arange(kernel.width)[None, :]
    weights = kernel.evaluate(t[:, None] - nodes)
    return nodes % size, weights


def interpolation_tables(
    traj: Trajectory, oversampled_shape: Tuple[int, int], kernel: KernelSpec
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Flat grid indices and separable weights of every sample's J x J taps.

    Returns:
        (indices, weights), both (M, J*J)
    """
    k0, k1 = oversampled_shape
    nodes0, weights0 = _axis_taps(traj.kx, k0, kernel)
    nodes1, weights1 = _axis_taps(traj.ky, k1, kernel)
    n_samples = len(traj)
    indices = (nodes0[:, :, None] * k1 + nodes1[:, None, :]).reshape(n_samples, -1)
    weights = (weights0[:, :, None] * weights1[:, None, :]).reshape(n_samples, -1)
    return indices, weights


def cartesian_gram_level(n: int, k: int, kernel: KernelSpec) -> float:
    """
    Mean of G G^H 1 along one axis for n equispaced samples on a grid of k nodes.

    Full Cartesian sampling in 2D gives the product of the two axis levels.
    """
    nodes, weights = _axis_taps(centered_coordinates(n) / n, k, kernel)
    spread = np.bincount(nodes.ravel(), weights=weights.ravel(), minlength=k)
    return float(np.mean((weights * spread[nodes]).sum(axis=1)))


def _deapodization(kernel: KernelSpec, n: int, k: int) -> np.ndarray:
    footprint = kernel.footprint(centered_coordinates(n) / k)
    if not (footprint > 0).all():
        raise ParameterError(
            f"kernel footprint not positive on a grid of {n} (oversampled {k}); "
            f"increase sigma or J"
        )
    return footprint


def make_plan(
    traj: Union[Trajectory, np.ndarray],
    grid_h: int,
    grid_w: int,
    oversampling_sigma: float = DEFAULT_OVERSAMPLING,
    width_J: int = DEFAULT_KERNEL_WIDTH,
    norm: str = "backward",
    workers: int = 1,
) -> NufftPlan:
    """
    Build a NUFFT plan.

    Args:
        traj: Trajectory, or an (M, 2) array validated as one
        grid_h: Image height
        grid_w: Image width
        oversampling_sigma: Oversampling factor, >= 1.25
        width_J: Kernel taps per axis, >= 2
        norm: "backward" or "ortho"
        workers: FFT worker threads

    Returns:
        Immutable NufftPlan

    Raises:
        DomainError: trajectory coordinate outside [-0.5, 0.5)
        ParameterError: sigma, J, grid size or norm out of range
    """
    if not isinstance(traj, Trajectory):
        traj = Trajectory(traj)
    if grid_h < 1 or grid_w < 1:
        raise ParameterError(f"grid dimensions must be positive, received {grid_h}x{grid_w}")
    if not oversampling_sigma >= MIN_OVERSAMPLING:
        raise ParameterError(f"oversampling sigma must be >= {MIN_OVERSAMPLING}, received {oversampling_sigma}")
    if norm not in NUFFT_NORMS:
        raise ParameterError(f"norm must be one of {NUFFT_NORMS}, received {norm!r}")
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, received {workers}")

    kernel = make_kernel(width_J, oversampling_sigma)
    k0 = max(int(round(oversampling_sigma * grid_h)), grid_h)
    k1 = max(int(round(oversampling_sigma * grid_w)), grid_w)

    indices, weights = interpolation_tables(traj, (k0, k1), kernel)
    n_samples = len(traj)

    deapod = 1.0 / np.outer(_deapodization(kernel, grid_h, k0), _deapodization(kernel, grid_w, k1))

    plan = NufftPlan(
        trajectory=traj,
        grid_h=grid_h,
        grid_w=grid_w,
        oversampling_sigma=float(oversampling_sigma),
        kernel=kernel,
        oversampled_shape=(k0, k1),
        interp_indices=indices,
        interp_weights=weights,
        deapod=deapod,
        norm=norm,
        workers=workers,
    )
    logger.debug(
        "plan_built",
        samples=n_samples,
        grid=(grid_h, grid_w),
        oversampled=(k0, k1),
        width=kernel.width,
        beta=round(kernel.beta, 4),
        norm=norm,
    )
    return plan
