"""
Experiment setup: trajectory, plan, DC weights and seeded phantom sets.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import structlog

from src.core.types import DcWeights, Trajectory
from src.dcomp.pipe_menon import pipe_menon
from src.learn.trainer import TrainingExample
from src.nufft.plan import NufftPlan, make_plan
from src.trajectories.generators import acceleration_factor, generate

from .config import DataSettings, NufftSettings, ReconConfig
from .phantoms import phantom_family
from .simulate import simulate_kspace

logger = structlog.get_logger(__name__)


def build_trajectory(data: DataSettings) -> Trajectory:
    """Trajectory of the configured kind; cartesian covers the whole grid."""
    if data.trajectory == "cartesian":
        return generate("cartesian", data.grid[0], data.grid[1])
    return generate(data.trajectory, data.spokes, data.samples, data.turns)


def build_plan(traj: Trajectory, grid, nufft: NufftSettings) -> NufftPlan:
    return make_plan(
        traj,
        grid[0],
        grid[1],
        oversampling_sigma=nufft.sigma,
        width_J=nufft.width,
        norm=nufft.norm,
        workers=nufft.workers,
    )


def noise_seed(set_seed: int, index: int) -> int:
    """Independent noise seed per example of a set."""
    return int(np.random.SeedSequence([set_seed, index]).generate_state(1)[0])


def build_examples(
    n: int, seed: int, plan: NufftPlan, d: Optional[DcWeights], data: DataSettings, prefix: str
) -> List[TrainingExample]:
    images = phantom_family(n, data.grid[0], data.grid[1], seed)
    return [
        TrainingExample(
            y=simulate_kspace(x, plan, data.noise, noise_seed(seed, i)),
            plan=plan,
            d=d,
            x_ref=x,
            name=f"{prefix}{i:03d}",
        )
        for i, x in enumerate(images)
    ]


@dataclass(frozen=True, eq=False)
class ExperimentSetup:
    trajectory: Trajectory
    plan: NufftPlan
    d: DcWeights
    train: List[TrainingExample]
    val: List[TrainingExample]


def prepare_experiment(config: ReconConfig) -> ExperimentSetup:
    """Build the plan, Pipe-Menon weights and train/validation sets."""
    data = config.data
    traj = build_trajectory(data)
    plan = build_plan(traj, data.grid, config.nufft)
    d = pipe_menon(plan, config.dcomp.n_iter, config.dcomp.kernel_width)
    train = build_examples(data.n_train, data.train_seed, plan, d, data, "train")
    val = build_examples(data.n_val, data.val_seed, plan, d, data, "val")
    logger.info(
        "experiment_prepared",
        trajectory=data.trajectory,
        samples=len(traj),
        grid=data.grid,
        acceleration=round(acceleration_factor(traj, *data.grid), 3),
        n_train=len(train),
        n_val=len(val),
    )
    return ExperimentSetup(trajectory=traj, plan=plan, d=d, train=train, val=val)
