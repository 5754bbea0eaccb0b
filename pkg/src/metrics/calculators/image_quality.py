"""
Image quality calculators: PSNR, SSIM and MS-SSIM on magnitude images.

Inputs may be single images (H, W) or stacks (S, H, W); complex inputs
are reduced to their modulus first. With ``data_range=None`` the range is
the maximum of the reference over the whole stack.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np
from skimage.metrics import structural_similarity

from src.core.constants import MS_SSIM_WEIGHTS, SSIM_K1, SSIM_K2, SSIM_WINDOW
from src.core.exceptions import DimensionError, ParameterError, ScaleError
from src.core.types import ComplexImage

ImageLike = Union[np.ndarray, ComplexImage]


def as_magnitude_stack(image: ImageLike) -> np.ndarray:
    """Modulus of an image or stack, always returned as (S, H, W) float64."""
    data = image.data if isinstance(image, ComplexImage) else np.asarray(image)
    data = np.abs(data).astype(np.float64, copy=False)
    if data.ndim == 2:
        data = data[None]
    if data.ndim != 3:
        raise DimensionError(f"expected an image or a stack of images, received shape {data.shape}")
    return data


def _pair(ref: ImageLike, test: ImageLike) -> Tuple[np.ndarray, np.ndarray]:
    ref_stack, test_stack = as_magnitude_stack(ref), as_magnitude_stack(test)
    if ref_stack.shape != test_stack.shape:
        raise DimensionError(f"shape mismatch: ref {ref_stack.shape}, test {test_stack.shape}")
    return ref_stack, test_stack


def _resolve_range(ref_stack: np.ndarray, data_range: Optional[float]) -> float:
    value = float(ref_stack.max()) if data_range is None else float(data_range)
    if not value > 0:
        raise ParameterError(f"data range must be > 0, received {value}")
    return value


def psnr(ref: ImageLike, test: ImageLike, data_range: Optional[float] = None) -> float:
    """
    Peak signal-to-noise ratio in dB.

    Args:
        ref: Reference magnitude image or stack
        test: Test image or stack, same shape
        data_range: Peak value; None for max(ref) over the stack

    Returns:
        20*log10(range) - 10*log10(MSE); +inf when MSE is 0
    """
    ref_stack, test_stack = _pair(ref, test)
    peak = _resolve_range(ref_stack, data_range)
    mse = float(np.mean((ref_stack - test_stack) ** 2))
    if mse == 0.0:
        return float("inf")
    return 20.0 * np.log10(peak) - 10.0 * np.log10(mse)


def _ssim_slice(ref: np.ndarray, test: np.ndarray, data_range: float) -> float:
    if min(ref.shape) < SSIM_WINDOW:
        raise ScaleError(f"image {ref.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window")
    return float(
        structural_similarity(
            ref,
            test,
            win_size=SSIM_WINDOW,
            data_range=data_range,
            K1=SSIM_K1,
            K2=SSIM_K2,
            use_sample_covariance=True,
            gaussian_weights=False,
        )
    )


def ssim(ref: ImageLike, test: ImageLike, data_range: Optional[float] = None) -> float:
    """
    Mean structural similarity over all fully contained 7x7 windows.

    C1 = (0.01 * range)^2, C2 = (0.03 * range)^2, sample covariance.
    A stack scores the mean over its slices.

    Raises:
        ScaleError: image smaller than the window
    """
    ref_stack, test_stack = _pair(ref, test)
    peak = _resolve_range(ref_stack, data_range)
    return float(np.mean([_ssim_slice(r, t, peak) for r, t in zip(ref_stack, test_stack)]))


def average_pool(image: np.ndarray) -> np.ndarray:
    """2x2 mean pooling; an odd trailing row or column is dropped."""
    h, w = image.shape[0] // 2, image.shape[1] // 2
    return image[: 2 * h, : 2 * w].reshape(h, 2, w, 2).mean(axis=(1, 3))


def ms_ssim_scales(shape: Tuple[int, int], n_scales: int = len(MS_SSIM_WEIGHTS)) -> Sequence[Tuple[int, int]]:
    """Image shape at each scale of the dyadic pyramid."""
    shapes = [tuple(shape)]
    for _ in range(n_scales - 1):
        shapes.append((shapes[-1][0] // 2, shapes[-1][1] // 2))
    return shapes


def ms_ssim_supported(shape: Tuple[int, int], n_scales: int = len(MS_SSIM_WEIGHTS)) -> bool:
    """True when the coarsest pyramid level still holds an SSIM window."""
    return min(ms_ssim_scales(shape, n_scales)[-1]) >= SSIM_WINDOW


def ms_ssim(
    ref: ImageLike,
    test: ImageLike,
    data_range: Optional[float] = None,
    weights: Sequence[float] = MS_SSIM_WEIGHTS,
) -> float:
    """
    Multiscale SSIM.

    Product over scales of the per-scale mean SSIM (clamped at 0) raised to
    its exponent, with 2x2 average pooling between scales.

    Raises:
        ScaleError: coarsest scale smaller than the SSIM window
    """
    ref_stack, test_stack = _pair(ref, test)
    peak = _resolve_range(ref_stack, data_range)
    scales = ms_ssim_scales(ref_stack.shape[1:], len(weights))
    if not ms_ssim_supported(ref_stack.shape[1:], len(weights)):
        raise ScaleError(
            f"image {ref_stack.shape[1:]} too small for {len(weights)} scales; "
            f"coarsest scale {scales[-1]} is below the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )

    values = []
    for r, t in zip(ref_stack, test_stack):
        score = 1.0
        for level, weight in enumerate(weights):
            if level > 0:
                r, t = average_pool(r), average_pool(t)
            score *= max(_ssim_slice(r, t, peak), 0.0) ** weight
        values.append(score)
    return float(np.mean(values))


def error_map(recon: ImageLike, ref: ImageLike) -> np.ndarray:
    """Absolute error |recon - ref| of complex values, same shape as the inputs."""
    recon_data = recon.data if isinstance(recon, ComplexImage) else np.asarray(recon)
    ref_data = ref.data if isinstance(ref, ComplexImage) else np.asarray(ref)
    if recon_data.shape != ref_data.shape:
        raise DimensionError(f"shape mismatch: recon {recon_data.shape}, ref {ref_data.shape}")
    return np.abs(recon_data - ref_data)


def ssim_direct(ref: np.ndarray, test: np.ndarray, data_range: float) -> float:
    """
    SSIM by explicit loops over every fully contained 7x7 window.

    Slow reference for ``ssim`` on single 2D images.
    """
    ref = np.abs(np.asarray(ref, dtype=np.complex128))
    test = np.abs(np.asarray(test, dtype=np.complex128))
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    n = SSIM_WINDOW
    values = []
    for i in range(ref.shape[0] - n + 1):
        for j in range(ref.shape[1] - n + 1):
            a = ref[i:i + n, j:j + n].ravel()
            b = test[i:i + n, j:j + n].ravel()
            mu_a, mu_b = a.mean(), b.mean()
            var_a, var_b = a.var(ddof=1), b.var(ddof=1)
            cov = np.sum((a - mu_a) * (b - mu_b)) / (a.size - 1)
            values.append(
                ((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2))
            )
    return float(np.mean(values))
