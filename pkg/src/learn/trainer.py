"""
Training loop for unrolled models.

Batch size 1, examples visited in a seeded shuffled order each epoch,
Adam updates on the flat parameter vector, L1 magnitude loss.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from tqdm import tqdm

from src.core.constants import DEFAULT_LEARNING_RATE
from src.core.exceptions import ParameterError, TrainingError
from src.core.types import ComplexImage, DcWeights, KSpaceSamples
from src.metrics.calculators.image_quality import ms_ssim_supported
from src.nufft.plan import NufftPlan
from src.recon.model import UnrolledModel
from src.recon.reconstruct import unrolled_forward

from .gradcheck import finite_diff_grad
from .losses import compound_loss, loss_l1, loss_l1_grad
from .optim import AdamState, adam_step
from .tape import GradientTape, backward

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class TrainingExample:
    """One slice: measurements, their plan and DC weights, and the reference image."""
    y: KSpaceSamples
    plan: NufftPlan
    d: Optional[DcWeights]
    x_ref: ComplexImage
    name: str = ""

    def normalized(self) -> "TrainingExample":
        """Scale y and x_ref together so max|x_ref| = 1."""
        peak = float(np.max(self.x_ref.magnitude()))
        if peak == 0.0:
            return self
        return TrainingExample(
            y=KSpaceSamples(self.y.values / peak),
            plan=self.plan,
            d=self.d,
            x_ref=ComplexImage(self.x_ref.data / peak),
            name=self.name,
        )


@dataclass
class TrainingHistory:
    """Per-step loss records (epoch, step, loss); step is the 1-based global step."""
    records: List[Tuple[int, int, float]] = field(default_factory=list)
    compound: Dict[int, float] = field(default_factory=dict)

    def append(self, epoch: int, step: int, loss: float) -> None:
        if self.records and step <= self.records[-1][1]:
            raise TrainingError(f"step {step} recorded after step {self.records[-1][1]}")
        self.records.append((epoch, step, float(loss)))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def losses(self) -> List[float]:
        return [loss for _, _, loss in self.records]

    def epoch_means(self) -> Dict[int, float]:
        means: Dict[int, List[float]] = {}
        for epoch, _, loss in self.records:
            means.setdefault(epoch, []).append(loss)
        return {epoch: float(np.mean(values)) for epoch, values in means.items()}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=["epoch", "step", "loss"])


def example_loss_and_grad(model: UnrolledModel, example: TrainingExample) -> Tuple[float, np.ndarray]:
    """L1 loss of one example and its gradient with respect to the flat parameters."""
    tape = GradientTape()
    d = example.d if model.use_dc else None
    x_hat = unrolled_forward(model, example.plan, d, example.y, tape=tape)
    loss = loss_l1(x_hat, example.x_ref)
    grad = backward(tape, loss_l1_grad(x_hat, example.x_ref))
    return loss, grad


def evaluate_loss(model: UnrolledModel, dataset: Sequence[TrainingExample]) -> float:
    """Mean L1 loss over normalized examples, without gradients."""
    losses = []
    for example in dataset:
        example = example.normalized()
        d = example.d if model.use_dc else None
        losses.append(loss_l1(unrolled_forward(model, example.plan, d, example.y), example.x_ref))
    return float(np.mean(losses))


def train(
    model: UnrolledModel,
    dataset: Sequence[TrainingExample],
    epochs: int,
    seed: int = 0,
    lr: float = DEFAULT_LEARNING_RATE,
    show_progress: bool = False,
    compound_alpha: Optional[float] = None,
    max_steps: Optional[int] = None,
) -> Tuple[UnrolledModel, TrainingHistory]:
    """
    Train a model with Adam, one example per step.

    Args:
        model: Initial model (not modified)
        dataset: Training examples
        epochs: Passes over the dataset, >= 0
        seed: Seed of the per-epoch shuffles
        lr: Adam learning rate
        show_progress: Show a tqdm bar over epochs
        compound_alpha: When set, the mean compound loss of each epoch's
            outputs is kept in ``history.compound``; NaN when the images
            are too small for MS-SSIM and alpha > 0
        max_steps: Stop after this many steps

    Returns:
        (trained model, history)
    """
    if not dataset:
        raise ParameterError("training dataset is empty")
    if epochs < 0:
        raise ParameterError(f"epochs must be >= 0, received {epochs}")

    examples = [example.normalized() for example in dataset]
    rng = np.random.default_rng(seed)
    params = model.flatten()
    state = AdamState.zeros(params.size, lr=lr)
    history = TrainingHistory()
    step = 0

    compound_available = compound_alpha is not None
    if compound_available and compound_alpha > 0.0:
        too_small = sorted({e.x_ref.shape for e in examples if not ms_ssim_supported(e.x_ref.shape)})
        if too_small:
            compound_available = False
            logger.warning("compound_loss_unavailable", shapes=too_small, reason="below the MS-SSIM minimum size")

    logger.info("training_started", examples=len(examples), epochs=epochs, parameters=params.size, lr=lr)
    for epoch in tqdm(range(1, epochs + 1), desc="epochs", disable=not show_progress):
        compound_values = []
        epoch_steps = 0
        for index in rng.permutation(len(examples)):
            if max_steps is not None and step >= max_steps:
                break
            example = examples[index]
            current = model.with_parameters(params)
            loss, grad = example_loss_and_grad(current, example)
            params, state = adam_step(params, grad, state)
            step += 1
            epoch_steps += 1
            history.append(epoch, step, loss)
            if compound_available:
                d = example.d if model.use_dc else None
                x_hat = unrolled_forward(current, example.plan, d, example.y)
                compound_values.append(compound_loss(x_hat, example.x_ref, compound_alpha))
        if compound_alpha is not None and epoch_steps:
            history.compound[epoch] = float(np.mean(compound_values)) if compound_values else float("nan")
        epoch_mean = history.epoch_means().get(epoch)
        if epoch_mean is not None:
            logger.info(
                "epoch_done",
                epoch=epoch,
                step=step,
                mean_loss=round(epoch_mean, 6),
                compound_loss=history.compound.get(epoch),
            )
        if max_steps is not None and step >= max_steps:
            break

    return model.with_parameters(params), history


def check_gradient(model: UnrolledModel, example: TrainingExample, eps: float = 1e-6) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tape gradient and central finite differences of the L1 loss.

    Returns:
        (analytic, numeric), both in flat parameter order
    """
    d = example.d if model.use_dc else None
    _, analytic = example_loss_and_grad(model, example)

    def loss_at(params: np.ndarray) -> float:
        x_hat = unrolled_forward(model.with_parameters(params), example.plan, d, example.y)
        return loss_l1(x_hat, example.x_ref)

    return analytic, finite_diff_grad(loss_at, model.flatten(), eps)
