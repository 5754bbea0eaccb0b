"""
Training and evaluation losses on magnitude images.
"""

import numpy as np

from src.core.constants import COMPOUND_LOSS_ALPHA
from src.core.exceptions import DimensionError, ParameterError
from src.metrics.calculators.image_quality import ImageLike, ms_ssim


def _arrays(x_hat: ImageLike, x_ref: ImageLike):
    a = np.asarray(getattr(x_hat, "data", x_hat))
    b = np.asarray(getattr(x_ref, "data", x_ref))
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def loss_l1(x_hat: ImageLike, x_ref: ImageLike) -> float:
    """Mean absolute difference of magnitudes."""
    a, b = _arrays(x_hat, x_ref)
    return float(np.mean(np.abs(np.abs(a) - np.abs(b))))


def loss_l1_grad(x_hat: ImageLike, x_ref: ImageLike) -> np.ndarray:
    """
    Cotangent of loss_l1 with respect to complex x_hat.

    sign(|x_hat| - |x_ref|) * x_hat / |x_hat| / N, taking 0 at ties and
    where x_hat is 0.
    """
    a, b = _arrays(x_hat, x_ref)
    magnitude = np.abs(a)
    direction = np.divide(a, magnitude, out=np.zeros_like(a, dtype=np.complex128), where=magnitude > 0)
    return np.sign(magnitude - np.abs(b)) * direction / a.size


def compound_loss(x_hat: ImageLike, x_ref: ImageLike, alpha: float = COMPOUND_LOSS_ALPHA) -> float:
    """
    alpha * (1 - MS-SSIM(x_ref, x_hat)) + (1 - alpha) * L1.

    Evaluation only; not differentiated. The MS-SSIM range is max |x_ref|.
    With alpha = 0 the MS-SSIM term is skipped, so small images work.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must be in [0, 1], received {alpha}")
    l1 = loss_l1(x_hat, x_ref)
    if alpha == 0.0:
        return l1
    similarity = ms_ssim(x_ref, x_hat)
    return alpha * (1.0 - similarity) + (1.0 - alpha) * l1
