"""Non-uniform FFT: Kaiser-Bessel gridding plans, transforms and the exact NDFT."""

from .kernel import KernelSpec, beatty_beta, kaiser_bessel, kaiser_bessel_transform, make_kernel
from .ndft import ndft_adjoint, ndft_forward
from .operators import nufft_adjoint, nufft_adjoint_array, nufft_forward, nufft_forward_array
from .plan import NufftPlan, make_plan

__all__ = [
    "KernelSpec",
    "NufftPlan",
    "beatty_beta",
    "kaiser_bessel",
    "kaiser_bessel_transform",
    "make_kernel",
    "make_plan",
    "ndft_adjoint",
    "ndft_forward",
    "nufft_adjoint",
    "nufft_adjoint_array",
    "nufft_forward",
    "nufft_forward_array",
]
