"""
Gridding NUFFT and its adjoint.

Forward: deapodize, zero-pad onto the oversampled grid, FFT, interpolate.
Adjoint: the literal transpose of that chain. Both apply ``plan.scale``.
The ``*_array`` variants work on raw numpy arrays and skip validation;
they are what the data-consistency and gradient code call in loops.
"""

import numpy as np

from src.core.exceptions import DimensionError
from src.core.linalg import FFTDirection, fft2_array
from src.core.types import ComplexImage, KSpaceSamples

from .plan import NufftPlan


def nufft_forward_array(plan: NufftPlan, x: np.ndarray) -> np.ndarray:
    """Image array (H, W) -> samples array (M,)."""
    k0, k1 = plan.oversampled_shape
    grid = np.zeros((k0, k1), dtype=np.complex128)
    grid[np.ix_(plan.row_positions, plan.col_positions)] = x * plan.deapod
    spectrum = fft2_array(grid, FFTDirection.FORWARD, workers=plan.workers)
    return (plan.interp_matrix @ spectrum.ravel()) * plan.scale


def nufft_adjoint_array(plan: NufftPlan, y: np.ndarray) -> np.ndarray:
    """Samples array (M,) -> image array (H, W)."""
    k0, k1 = plan.oversampled_shape
    spectrum = (plan.interp_matrix_h @ np.asarray(y, dtype=np.complex128)).reshape(k0, k1)
    # adjoint of the unscaled forward FFT is K0*K1 times the inverse
    grid = fft2_array(spectrum, FFTDirection.INVERSE, workers=plan.workers) * (k0 * k1)
    return grid[np.ix_(plan.row_positions, plan.col_positions)] * plan.deapod * plan.scale


def nufft_forward(plan: NufftPlan, img: ComplexImage) -> KSpaceSamples:
    """
    Approximate non-uniform DFT of an image at the plan's sample locations.

    Raises:
        DimensionError: image shape differs from the plan's grid
    """
    if img.shape != plan.grid_shape:
        raise DimensionError(f"image shape {img.shape} does not match plan grid {plan.grid_shape}")
    return KSpaceSamples(nufft_forward_array(plan, img.data))


def nufft_adjoint(plan: NufftPlan, y: KSpaceSamples) -> ComplexImage:
    """
    Conjugate transpose of nufft_forward.

    Raises:
        DimensionError: sample count differs from the plan's trajectory
    """
    if len(y) != plan.n_samples:
        raise DimensionError(f"received {len(y)} samples, plan expects {plan.n_samples}")
    return ComplexImage(nufft_adjoint_array(plan, y.values))
