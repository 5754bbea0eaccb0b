"""
Image quality calculators.
"""

from .image_quality import (
    as_magnitude_stack,
    error_map,
    ms_ssim,
    ms_ssim_supported,
    psnr,
    ssim,
    ssim_direct,
)

__all__ = [
    "as_magnitude_stack",
    "error_map",
    "ms_ssim",
    "ms_ssim_supported",
    "psnr",
    "ssim",
    "ssim_direct",
]
