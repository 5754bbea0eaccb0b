"""
Built-in verification suite.

Runs the NUFFT oracle, adjointness, density compensation, gradient and
metric checks end to end. Each check returns a CheckResult; the suite
passes when all of them pass.
"""

import time
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
import structlog

from src.core.linalg import inner_product, norm
from src.core.types import ComplexImage, KSpaceSamples, Trajectory
from src.dcomp.pipe_menon import pipe_menon, pipe_menon_report
from src.learn.gradcheck import normalized_max_error
from src.learn.trainer import TrainingExample, check_gradient
from src.metrics.calculators.image_quality import ms_ssim, psnr, ssim, ssim_direct
from src.nufft.ndft import ndft_forward
from src.nufft.operators import nufft_adjoint, nufft_forward
from src.nufft.plan import make_plan
from src.recon.correction import CorrectionKind, CorrectionOp
from src.recon.model import UnrolledModel
from src.trajectories.generators import cartesian_full, radial, spiral

from .phantoms import SHEPP_LOGAN_ELLIPSES, ellipse_masks, render
from .simulate import simulate_kspace

logger = structlog.get_logger(__name__)

ORACLE_TOLERANCE = 1e-5
ADJOINT_TOLERANCE = 1e-10
DC_FIXED_POINT_TOLERANCE = 1e-3
DC_STABILIZATION_LIMIT = 0.05
GRADIENT_TOLERANCE = 1e-4
SSIM_ORACLE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def random_image(rng: np.random.Generator, h: int, w: int) -> ComplexImage:
    return ComplexImage(rng.standard_normal((h, w)) + 1j * rng.standard_normal((h, w)))


def random_samples(rng: np.random.Generator, m: int) -> KSpaceSamples:
    return KSpaceSamples(rng.standard_normal(m) + 1j * rng.standard_normal(m))


def relative_error(estimate: np.ndarray, reference: np.ndarray) -> float:
    return float(np.linalg.norm(estimate - reference) / np.linalg.norm(reference))


def adjoint_mismatch(plan, x: ComplexImage, y: KSpaceSamples) -> float:
    """|<Fx, y> - <x, F^H y>| / (||Fx|| ||y||)."""
    fx = nufft_forward(plan, x)
    lhs = inner_product(fx, y)
    rhs = inner_product(x, nufft_adjoint(plan, y))
    return abs(lhs - rhs) / (norm(fx) * norm(y))


def check_nufft_oracle(seed: int = 0) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    x = random_image(rng, 32, 32)
    traj = Trajectory(rng.uniform(-0.5, 0.5, size=(500, 2)))
    plan = make_plan(traj, 32, 32, oversampling_sigma=2.0, width_J=6)
    error = relative_error(nufft_forward(plan, x).values, ndft_forward(x, traj).values)
    return error <= ORACLE_TOLERANCE, f"relative L2 error {error:.2e} (limit {ORACLE_TOLERANCE:.0e})"


def check_adjointness(seed: int = 0, pairs: int = 20) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    plans = {
        "radial": make_plan(radial(16, 32), 16, 16),
        "spiral": make_plan(spiral(8, 64), 16, 16),
        "cartesian": make_plan(cartesian_full(16, 16), 16, 16),
    }
    worst = 0.0
    for plan in plans.values():
        for _ in range(pairs):
            x, y = random_image(rng, 16, 16), random_samples(rng, plan.n_samples)
            worst = max(worst, adjoint_mismatch(plan, x, y))
    return worst <= ADJOINT_TOLERANCE, f"worst mismatch {worst:.2e} over {pairs} pairs x {len(plans)} kinds"


def check_density_compensation() -> Tuple[bool, str]:
    cartesian_plan = make_plan(cartesian_full(8, 8), 8, 8, norm="ortho")
    weights, _ = pipe_menon_report(cartesian_plan, 10)
    deviation = float(np.max(np.abs(weights.values - 1.0)))

    n_spokes, n_per_spoke = 20, 64
    radial_plan = make_plan(radial(n_spokes, n_per_spoke), 32, 32, norm="ortho")
    radial_weights, report = pipe_menon_report(radial_plan, 10)
    per_spoke = radial_weights.values.reshape(n_spokes, n_per_spoke)
    center_lower = bool((per_spoke[:, n_per_spoke // 2] < per_spoke[:, 0]).all())
    positive = bool((radial_weights.values > 0).all())

    passed = (
        deviation <= DC_FIXED_POINT_TOLERANCE
        and report.last_relative_change < DC_STABILIZATION_LIMIT
        and positive
        and center_lower
    )
    detail = (
        f"cartesian |d - 1| {deviation:.2e}, radial last change {report.last_relative_change:.3f}, "
        f"positive {positive}, center < edge {center_lower}"
    )
    return passed, detail


def small_phantom(h: int, w: int) -> ComplexImage:
    """Shepp-Logan rendered at sizes below the usual minimum."""
    return render(ellipse_masks(h, w), [e.intensity for e in SHEPP_LOGAN_ELLIPSES])


def gradient_check_model(
    n_iter: int, buffer_size: int, filters: int, kind: CorrectionKind, use_dc: bool, seed: int
) -> UnrolledModel:
    """
    Model whose ReLU inputs stay away from 0: small random kernels and
    first-layer biases of +1 and -1.
    """
    rng = np.random.default_rng(seed)
    corrections = []
    for _ in range(n_iter):
        if kind is CorrectionKind.GRADIENT_STEP:
            arrays = {"tau": np.array([rng.uniform(0.2, 0.8)])}
        else:
            in_planes, out_planes = 2 * buffer_size + 2, 2 * buffer_size
            bias = np.where(np.arange(filters) % 2 == 0, 1.0, -1.0)
            arrays = {
                "conv1.weight": rng.uniform(-0.01, 0.01, size=(filters, in_planes, 3, 3)),
                "conv1.bias": bias,
                "conv2.weight": rng.uniform(-0.01, 0.01, size=(out_planes, filters, 3, 3)),
                "conv2.bias": rng.uniform(-0.01, 0.01, size=out_planes),
            }
        corrections.append(CorrectionOp.from_arrays(kind, arrays, buffer_size, filters))
    return UnrolledModel(n_iter, buffer_size, corrections, use_dc)


def gradient_check_example(grid: int = 8, n_spokes: int = 6, n_per_spoke: int = 16) -> TrainingExample:
    plan = make_plan(radial(n_spokes, n_per_spoke), grid, grid, norm="ortho")
    x_ref = small_phantom(grid, grid)
    return TrainingExample(
        y=simulate_kspace(x_ref, plan), plan=plan, d=pipe_menon(plan, 10), x_ref=x_ref, name="gradcheck"
    )


def check_gradients(seed: int = 0) -> Tuple[bool, str]:
    example = gradient_check_example()
    model = gradient_check_model(3, 2, 4, CorrectionKind.SMALL_CNN, use_dc=True, seed=seed)
    analytic, numeric = check_gradient(model, example, eps=1e-6)
    error = normalized_max_error(analytic, numeric)
    return error <= GRADIENT_TOLERANCE, f"max relative error {error:.2e} over {analytic.size} parameters"


def check_metrics(seed: int = 0) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    image = rng.uniform(0.0, 1.0, size=(128, 128))
    identical = ssim(image, image, 1.0) == 1.0 and ms_ssim(image, image, 1.0) == 1.0
    db = psnr(image, image + 0.1, data_range=1.0)
    a, b = rng.uniform(size=(32, 32)), rng.uniform(size=(32, 32))
    oracle_gap = abs(ssim(a, b, 1.0) - ssim_direct(a, b, 1.0))
    passed = identical and abs(db - 20.0) < 1e-9 and oracle_gap <= SSIM_ORACLE_TOLERANCE
    return passed, f"identical {identical}, psnr {db:.12f} dB, ssim oracle gap {oracle_gap:.1e}"


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("nufft_oracle", check_nufft_oracle),
    ("adjointness", check_adjointness),
    ("density_compensation", check_density_compensation),
    ("gradients", check_gradients),
    ("metrics", check_metrics),
]


def run_selftest() -> List[CheckResult]:
    """Run every check; an exception counts as a failure of that check."""
    results = []
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = check()
        except Exception as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - start
        results.append(CheckResult(name, bool(passed), detail, seconds))
        logger.info("selftest_check", check=name, passed=bool(passed), seconds=round(seconds, 2))
    return results
