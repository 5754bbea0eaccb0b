"""Single-coil k-space simulation."""

import numpy as np

from src.core.exceptions import ParameterError
from src.core.types import ComplexImage, KSpaceSamples
from src.nufft.operators import nufft_forward
from src.nufft.plan import NufftPlan


def simulate_kspace(x: ComplexImage, plan: NufftPlan, noise_sigma: float = 0.0, seed: int = 0) -> KSpaceSamples:
    """
    NUFFT of the image plus seeded complex Gaussian noise.

    Args:
        x: Ground-truth image
        plan: Acquisition plan
        noise_sigma: Standard deviation per real/imaginary component, >= 0
        seed: Noise seed

    Returns:
        Simulated measurements; exactly nufft_forward(plan, x) when noise_sigma is 0
    """
    if not noise_sigma >= 0:
        raise ParameterError(f"noise_sigma must be >= 0, received {noise_sigma}")
    y = nufft_forward(plan, x)
    if noise_sigma == 0:
        return y
    noise = np.random.default_rng(seed).normal(0.0, noise_sigma, size=(len(y), 2))
    return KSpaceSamples(y.values + noise[:, 0] + 1j * noise[:, 1])
