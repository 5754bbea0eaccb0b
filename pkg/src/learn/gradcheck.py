"""Finite-difference gradient checks."""

from typing import Callable

import numpy as np

from src.core.exceptions import ParameterError


def finite_diff_grad(loss_fn: Callable[[np.ndarray], float], params: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """
    Central differences (f(p + eps e_i) - f(p - eps e_i)) / (2 eps) per coordinate.

    Args:
        loss_fn: Scalar function of a flat real parameter vector
        params: Point of evaluation
        eps: Step, > 0
    """
    if not eps > 0:
        raise ParameterError(f"eps must be > 0, received {eps}")
    params = np.asarray(params, dtype=np.float64)
    grad = np.zeros_like(params)
    shifted = params.copy()
    for i in range(params.size):
        shifted[i] = params[i] + eps
        upper = loss_fn(shifted)
        shifted[i] = params[i] - eps
        lower = loss_fn(shifted)
        shifted[i] = params[i]
        grad[i] = (upper - lower) / (2.0 * eps)
    return grad


def normalized_max_error(grad: np.ndarray, reference: np.ndarray) -> float:
    """max_i |grad_i - reference_i| / max_i |reference_i| (absolute when the reference is 0)."""
    grad, reference = np.asarray(grad), np.asarray(reference)
    scale = float(np.max(np.abs(reference))) if reference.size else 0.0
    diff = float(np.max(np.abs(grad - reference))) if reference.size else 0.0
    return diff / scale if scale > 0 else diff
