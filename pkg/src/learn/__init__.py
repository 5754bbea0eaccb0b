"""
Gradients, optimizer and losses for training unrolled reconstructions.

The training loop lives in ``src.learn.trainer`` and is imported from there.
"""

from .gradcheck import finite_diff_grad, normalized_max_error
from .losses import compound_loss, loss_l1, loss_l1_grad
from .optim import AdamState, adam_step
from .tape import GradientTape, Variable, backward

__all__ = [
    "AdamState",
    "GradientTape",
    "Variable",
    "adam_step",
    "backward",
    "compound_loss",
    "finite_diff_grad",
    "loss_l1",
    "loss_l1_grad",
    "normalized_max_error",
]
