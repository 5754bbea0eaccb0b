"""
Pipe-Menon density compensation.

Fixed-point iteration d <- d / |G G^H d| starting from ones. G is
interpolation from the plan's oversampled grid with its own Kaiser-Bessel
kernel, without FFT, crop or deapodization. The Gram is scaled so full
Cartesian sampling has G G^H 1 = 1.
"""

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
import structlog
from scipy import sparse

from src.core.constants import DC_KERNEL_WIDTH, DC_SINGULARITY_THRESHOLD, DEFAULT_DC_ITERATIONS
from src.core.exceptions import DimensionError, ParameterError, SingularityError
from src.core.types import DcWeights, KSpaceSamples
from src.nufft.kernel import make_kernel
from src.nufft.plan import NufftPlan, cartesian_gram_level, interpolation_tables

logger = structlog.get_logger(__name__)

GramOperator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PipeMenonReport:
    """Summary of a Pipe-Menon run."""
    n_iter: int
    last_relative_change: float  # max_i |d_n(i) / d_{n-1}(i) - 1|, 0.0 for n_iter = 0


def density_gram(plan: NufftPlan, kernel_width: int = DC_KERNEL_WIDTH) -> GramOperator:
    """
    Normalized sample-domain Gram d -> G G^H d / c.

    c is the level G G^H 1 of full Cartesian sampling on the plan's grid.
    """
    kernel = make_kernel(kernel_width, plan.oversampling_sigma)
    k0, k1 = plan.oversampled_shape
    indices, weights = interpolation_tables(plan.trajectory, plan.oversampled_shape, kernel)
    rows = np.repeat(np.arange(plan.n_samples), indices.shape[1])
    interp = sparse.csr_matrix((weights.ravel(), (rows, indices.ravel())), shape=(plan.n_samples, k0 * k1))
    spread = interp.T.tocsr()
    level = cartesian_gram_level(plan.grid_h, k0, kernel) * cartesian_gram_level(plan.grid_w, k1, kernel)

    def apply(d: np.ndarray) -> np.ndarray:
        return interp @ (spread @ d) / level

    return apply


def pipe_menon_report(
    plan: NufftPlan, n_iter: int = DEFAULT_DC_ITERATIONS, kernel_width: int = DC_KERNEL_WIDTH
) -> Tuple[DcWeights, PipeMenonReport]:
    """
    Run the iteration and report the last relative change.

    Args:
        plan: NUFFT plan giving the trajectory and oversampled grid
        n_iter: Number of iterations, >= 0
        kernel_width: Taps per axis of the Gram kernel

    Returns:
        (weights, report)

    Raises:
        ParameterError: n_iter < 0 or kernel width too small
        SingularityError: |G G^H d| below threshold at some sample
    """
    if n_iter < 0:
        raise ParameterError(f"n_iter must be >= 0, received {n_iter}")

    gram = density_gram(plan, kernel_width)
    weights = np.ones(plan.n_samples, dtype=np.float64)
    change = 0.0
    for iteration in range(1, n_iter + 1):
        denominator = np.abs(gram(weights))
        singular = ~(denominator >= DC_SINGULARITY_THRESHOLD)
        if singular.any():
            index = int(np.argmax(singular))
            raise SingularityError(
                f"|G G^H d| = {denominator[index]:.3e} at sample {index} in iteration {iteration}",
                sample_index=index,
            )
        updated = weights / denominator
        change = float(np.max(np.abs(updated / weights - 1.0)))
        weights = updated
        logger.debug("pipe_menon_iteration", iteration=iteration, relative_change=change)

    logger.info("pipe_menon_done", n_iter=n_iter, samples=plan.n_samples, last_relative_change=change)
    return DcWeights(weights), PipeMenonReport(n_iter=n_iter, last_relative_change=change)


def pipe_menon(
    plan: NufftPlan, n_iter: int = DEFAULT_DC_ITERATIONS, kernel_width: int = DC_KERNEL_WIDTH
) -> DcWeights:
    """Density-compensation weights after n_iter Pipe-Menon iterations."""
    weights, _ = pipe_menon_report(plan, n_iter, kernel_width)
    return weights


def apply_dc(d: DcWeights, y: KSpaceSamples) -> KSpaceSamples:
    """Elementwise product d * y."""
    if len(d) != len(y):
        raise DimensionError(f"{len(d)} DC weights for {len(y)} samples")
    return KSpaceSamples(d.values * y.values)
