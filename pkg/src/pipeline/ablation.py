"""
Comparison of the reconstruction methods on a validation set:
DC adjoint, unrolled without DC, unrolled with DC.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.core.types import ComplexImage
from src.learn.trainer import TrainingExample, TrainingHistory, train
from src.metrics.calculators.image_quality import psnr, ssim
from src.recon.model import UnrolledModel, build_model
from src.recon.reconstruct import dc_adjoint_recon, unrolled_forward

from .config import ReconConfig
from .dataset import ExperimentSetup, prepare_experiment

logger = structlog.get_logger(__name__)

METHOD_DC_ADJOINT = "dc-adjoint"
METHOD_UNROLLED_NO_DC = "unrolled-no-dc"
METHOD_UNROLLED_DC = "unrolled-dc"


@dataclass(frozen=True)
class AblationResult:
    method: str
    trajectory: str
    psnr: float
    ssim: float
    n_parameters: int


def evaluate(reconstruct: Callable[[TrainingExample], ComplexImage], examples: Sequence[TrainingExample]):
    """Mean PSNR and SSIM over normalized examples."""
    psnrs, ssims = [], []
    for example in examples:
        example = example.normalized()
        recon = reconstruct(example)
        psnrs.append(psnr(example.x_ref, recon))
        ssims.append(ssim(example.x_ref, recon))
    return float(np.mean(psnrs)), float(np.mean(ssims))


def train_unrolled(
    config: ReconConfig, setup: ExperimentSetup, use_dc: Optional[bool] = None
) -> Tuple[UnrolledModel, TrainingHistory]:
    """Train the configured model; use_dc overrides the model setting when given."""
    settings = config.model
    if use_dc is not None:
        settings = settings.model_copy(update={"use_dc": use_dc})
    model = build_model(settings, seed=config.training.seed)
    training = config.training
    epochs = training.epochs
    if training.max_steps is not None:
        epochs = max(epochs, math.ceil(training.max_steps / len(setup.train)))
    trained, history = train(
        model,
        setup.train,
        epochs=epochs,
        seed=training.seed,
        lr=training.lr,
        show_progress=training.show_progress,
        compound_alpha=training.alpha if training.report_compound else None,
        max_steps=training.max_steps,
    )
    logger.info(
        "unrolled_trained",
        use_dc=settings.use_dc,
        steps=len(history),
        final_loss=history.losses[-1] if history.losses else None,
    )
    return trained, history


def run_ablation(config: ReconConfig, setup: Optional[ExperimentSetup] = None) -> List[AblationResult]:
    """Train both unrolled variants and score all three methods on the validation set."""
    setup = setup if setup is not None else prepare_experiment(config)
    kind = config.data.trajectory
    rows = []

    scores = evaluate(lambda ex: dc_adjoint_recon(ex.plan, ex.d, ex.y), setup.val)
    rows.append(AblationResult(METHOD_DC_ADJOINT, kind, scores[0], scores[1], 0))

    for method, use_dc in ((METHOD_UNROLLED_NO_DC, False), (METHOD_UNROLLED_DC, True)):
        model, _ = train_unrolled(config, setup, use_dc)
        scores = evaluate(
            lambda ex, m=model: unrolled_forward(m, ex.plan, ex.d if m.use_dc else None, ex.y),
            setup.val,
        )
        rows.append(AblationResult(method, kind, scores[0], scores[1], model.n_parameters))

    for row in rows:
        logger.info("ablation_result", method=row.method, psnr=round(row.psnr, 3), ssim=round(row.ssim, 4))
    return rows
