"""
Adam optimizer on flat parameter vectors.
"""

from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from src.core.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, DEFAULT_LEARNING_RATE
from src.core.exceptions import DimensionError, ParameterError, TrainingError


@dataclass(frozen=True, eq=False)
class AdamState:
    """
    Moment estimates and hyperparameters.

    Attributes:
        m: First moment, one entry per parameter
        v: Second moment
        step: Number of updates applied
    """
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    lr: float = DEFAULT_LEARNING_RATE
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPSILON

    def __post_init__(self):
        if self.m.shape != self.v.shape:
            raise DimensionError(f"moment shapes differ: {self.m.shape} vs {self.v.shape}")
        if self.step < 0:
            raise ParameterError(f"step must be >= 0, received {self.step}")
        if not (np.isfinite(self.m).all() and np.isfinite(self.v).all()):
            raise TrainingError("Adam moments are not finite")
        if not self.lr > 0 or not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1 or not self.eps > 0:
            raise ParameterError(
                f"invalid Adam hyperparameters lr={self.lr} beta1={self.beta1} "
                f"beta2={self.beta2} eps={self.eps}"
            )

    @classmethod
    def zeros(cls, n_parameters: int, **hyperparameters) -> "AdamState":
        return cls(m=np.zeros(n_parameters), v=np.zeros(n_parameters), **hyperparameters)


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState) -> Tuple[np.ndarray, AdamState]:
    """
    One bias-corrected Adam update. Inputs are not modified.

    Returns:
        (new_params, new_state)

    Raises:
        DimensionError: lengths differ
        TrainingError: non-finite gradient entry
    """
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise DimensionError(
            f"params {params.shape}, grads {grads.shape} and state {state.m.shape} must match"
        )
    bad = ~np.isfinite(grads)
    if bad.any():
        index = int(np.argmax(bad))
        raise TrainingError(f"non-finite gradient {grads[index]} at parameter {index}", parameter_index=index)

    step = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * grads * grads
    m_hat = m / (1.0 - state.beta1 ** step)
    v_hat = v / (1.0 - state.beta2 ** step)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, replace(state, m=m, v=v, step=step)
