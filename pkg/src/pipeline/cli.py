"""
Command-line interface.

    traj gen   generate a trajectory CSV
    phantom    render a Shepp-Logan phantom (or a seeded variant)
    dcomp      Pipe-Menon weights for a trajectory
    simulate   k-space of an image along a trajectory
    recon      DC adjoint or unrolled reconstruction
    train      train an unrolled model on synthetic phantoms
    eval       PSNR / SSIM / MS-SSIM of test images against references
    ablate     compare the three methods on a validation set
    selftest   run the built-in verification suite

Exit codes: 0 success, 1 failed operation (one-line diagnostic on
stderr), 2 usage error.
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, Optional, Sequence

import structlog
from joblib import Parallel, delayed

from src.core.exceptions import ParameterError, ReconError, ScaleError
from src.core.logging_config import configure_logging
from src.dcomp.pipe_menon import pipe_menon_report
from src.learn.trainer import evaluate_loss
from src.metrics.calculators.image_quality import ms_ssim, psnr, ssim
from src.metrics.exporters.csv_reporter import write_ablation, write_history, write_metrics
from src.recon.reconstruct import dc_adjoint_recon, unrolled_forward
from src.trajectories.generators import TRAJECTORY_KINDS, acceleration_factor, generate

from .ablation import run_ablation, train_unrolled
from .config import RuntimeSettings, load_config, load_training_config, parse_grid
from .dataset import build_plan, prepare_experiment
from .formats import (
    read_image,
    read_kspace,
    read_model,
    read_trajectory,
    read_weights,
    write_image,
    write_kspace,
    write_model,
    write_trajectory,
    write_weights,
)
from .phantoms import phantom_family, shepp_logan
from .png import export_error_png, export_png
from .selftest import run_selftest
from .simulate import simulate_kspace

logger = structlog.get_logger(__name__)

RECON_METHODS = ("adjoint-dc", "unrolled")


def _grid(value: str):
    try:
        return parse_grid(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _plan(config, traj, grid):
    return build_plan(traj, grid, config.nufft)


# ----- commands -----

def cmd_traj_gen(args, config) -> int:
    traj = generate(args.kind, args.spokes, args.samples, args.turns)
    write_trajectory(traj, args.out)
    logger.info("trajectory_written", kind=args.kind, samples=len(traj), path=str(args.out))
    return 0


def cmd_phantom(args, config) -> int:
    h, w = args.grid
    if args.index is None:
        image = shepp_logan(h, w)
    elif args.index < 0:
        raise ParameterError(f"phantom index must be >= 0, received {args.index}")
    else:
        image = phantom_family(args.index + 1, h, w, args.seed)[args.index]
    write_image(image, args.out)
    if args.png:
        export_png(image, args.png)
    return 0


def cmd_dcomp(args, config) -> int:
    traj = read_trajectory(args.traj)
    plan = _plan(config, traj, args.grid)
    weights, report = pipe_menon_report(plan, args.iters, config.dcomp.kernel_width)
    write_weights(weights, args.out)
    logger.info(
        "dc_weights_written",
        samples=len(weights),
        acceleration=round(acceleration_factor(traj, *args.grid), 3),
        last_relative_change=report.last_relative_change,
        path=str(args.out),
    )
    return 0


def cmd_simulate(args, config) -> int:
    image = read_image(args.image)
    traj = read_trajectory(args.traj)
    plan = _plan(config, traj, image.shape)
    write_kspace(simulate_kspace(image, plan, args.noise, args.seed), args.out)
    return 0


def cmd_recon(args, config) -> int:
    traj = read_trajectory(args.traj)
    plan = _plan(config, traj, args.grid)
    y = read_kspace(args.kspace)
    d = read_weights(args.dc) if args.dc else None

    if args.method == "adjoint-dc":
        if d is None:
            raise ParameterError("--method adjoint-dc needs --dc")
        image = dc_adjoint_recon(plan, d, y)
    else:
        if not args.model:
            raise ParameterError("--method unrolled needs --model")
        model = read_model(args.model)
        image = unrolled_forward(model, plan, d if model.use_dc else None, y)

    write_image(image, args.out)
    if args.png:
        export_png(image, args.png)
    if args.error_png:
        if not args.ref:
            raise ParameterError("--error-png needs --ref")
        export_error_png(image, read_image(args.ref), args.error_png)
    return 0


def cmd_train(args, config) -> int:
    config = load_training_config(args.train_config, base=config)
    setup = prepare_experiment(config)
    trained, history = train_unrolled(config, setup)
    write_model(trained, args.out)
    if args.history:
        write_history(history.records, args.history)
    logger.info("training_done", steps=len(history), validation_l1=round(evaluate_loss(trained, setup.val), 6))
    return 0


def evaluate_case(ref_path: str, test_path: str, method: str) -> Dict[str, object]:
    """Metrics of one (reference, test) pair; MS-SSIM is nan when the image is too small."""
    ref, test = read_image(ref_path), read_image(test_path)
    try:
        multiscale = ms_ssim(ref, test)
    except ScaleError:
        multiscale = float("nan")
    return {
        "case": Path(test_path).stem,
        "method": method,
        "psnr": psnr(ref, test),
        "ssim": ssim(ref, test),
        "ms_ssim": multiscale,
    }


def cmd_eval(args, config) -> int:
    if len(args.ref) != len(args.test):
        raise ParameterError(f"{len(args.ref)} --ref files for {len(args.test)} --test files")
    n_jobs = args.jobs if args.jobs is not None else config.evaluation.n_jobs
    rows = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(evaluate_case)(ref, test, args.method) for ref, test in zip(args.ref, args.test)
    )
    write_metrics(rows, args.out)
    return 0


def cmd_ablate(args, config) -> int:
    if args.train_config:
        config = load_training_config(args.train_config, base=config)
    rows = run_ablation(config)
    write_ablation(rows, args.out)
    for row in rows:
        print(f"{row.method:16s} {row.trajectory:8s} psnr {row.psnr:7.3f}  ssim {row.ssim:.4f}  params {row.n_parameters}")
    return 0


def cmd_selftest(args, config) -> int:
    results = run_selftest()
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name} ({result.seconds:.2f} s): {result.detail}")
    return 0 if all(result.passed for result in results) else 1


# ----- parser -----

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nexus-recon", description="Non-Cartesian MRI reconstruction toolkit")
    parser.add_argument("--config", type=Path, default=None, help="YAML defaults (default: config/recon.yaml)")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--log-json", action="store_true", help="Log JSON lines")
    sub = parser.add_subparsers(dest="command", required=True)

    traj = sub.add_parser("traj", help="Trajectory tools")
    traj_sub = traj.add_subparsers(dest="traj_command", required=True)
    gen = traj_sub.add_parser("gen", help="Generate a trajectory CSV")
    gen.add_argument("--kind", choices=TRAJECTORY_KINDS, required=True)
    gen.add_argument("--spokes", type=int, required=True, help="Spokes / arms (rows for cartesian)")
    gen.add_argument("--samples", type=int, required=True, help="Samples per spoke / arm (columns for cartesian)")
    gen.add_argument("--turns", type=float, default=0.5, help="Spiral turns")
    gen.add_argument("--out", type=Path, required=True)
    gen.set_defaults(handler=cmd_traj_gen)

    phantom = sub.add_parser("phantom", help="Render a phantom image")
    phantom.add_argument("--grid", type=_grid, required=True, help="HxW")
    phantom.add_argument("--index", type=int, default=None, help="Variant index of the seeded family")
    phantom.add_argument("--seed", type=int, default=0)
    phantom.add_argument("--out", type=Path, required=True)
    phantom.add_argument("--png", type=Path, default=None)
    phantom.set_defaults(handler=cmd_phantom)

    dcomp = sub.add_parser("dcomp", help="Pipe-Menon density compensation")
    dcomp.add_argument("--traj", type=Path, required=True)
    dcomp.add_argument("--grid", type=_grid, required=True, help="HxW")
    dcomp.add_argument("--iters", type=int, default=10)
    dcomp.add_argument("--out", type=Path, required=True)
    dcomp.set_defaults(handler=cmd_dcomp)

    simulate = sub.add_parser("simulate", help="Simulate k-space measurements")
    simulate.add_argument("--image", type=Path, required=True)
    simulate.add_argument("--traj", type=Path, required=True)
    simulate.add_argument("--noise", type=float, default=0.0)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--out", type=Path, required=True)
    simulate.set_defaults(handler=cmd_simulate)

    recon = sub.add_parser("recon", help="Reconstruct an image")
    recon.add_argument("--method", choices=RECON_METHODS, required=True)
    recon.add_argument("--traj", type=Path, required=True)
    recon.add_argument("--grid", type=_grid, required=True, help="HxW")
    recon.add_argument("--kspace", type=Path, required=True)
    recon.add_argument("--dc", type=Path, default=None)
    recon.add_argument("--model", type=Path, default=None)
    recon.add_argument("--out", type=Path, required=True)
    recon.add_argument("--png", type=Path, default=None)
    recon.add_argument("--ref", type=Path, default=None, help="Reference image for --error-png")
    recon.add_argument("--error-png", type=Path, default=None)
    recon.set_defaults(handler=cmd_recon)

    train = sub.add_parser("train", help="Train an unrolled model")
    train.add_argument("--config", dest="train_config", type=Path, required=True, help="key = value file")
    train.add_argument("--out", type=Path, required=True)
    train.add_argument("--history", type=Path, default=None)
    train.set_defaults(handler=cmd_train)

    evaluate = sub.add_parser("eval", help="Image quality metrics")
    evaluate.add_argument("--ref", type=Path, action="append", required=True)
    evaluate.add_argument("--test", type=Path, action="append", required=True)
    evaluate.add_argument("--method", default="test")
    evaluate.add_argument("--jobs", type=int, default=None)
    evaluate.add_argument("--out", type=Path, required=True)
    evaluate.set_defaults(handler=cmd_eval)

    ablate = sub.add_parser("ablate", help="Compare DC adjoint and unrolled variants")
    ablate.add_argument("--config", dest="train_config", type=Path, default=None, help="key = value file")
    ablate.add_argument("--out", type=Path, required=True)
    ablate.set_defaults(handler=cmd_ablate)

    selftest = sub.add_parser("selftest", help="Run the verification suite")
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0

    runtime = RuntimeSettings()
    configure_logging(args.log_level or runtime.log_level, json=args.log_json or runtime.log_json)
    log = logger.bind(command=args.command)
    try:
        config = load_config(args.config if args.config is not None else runtime.config_path)
        if runtime.n_jobs is not None:
            evaluation = config.evaluation.model_copy(update={"n_jobs": runtime.n_jobs})
            config = config.model_copy(update={"evaluation": evaluation})
        log.info("command_started")
        code = args.handler(args, config)
        log.info("command_finished", exit_code=code)
        return code
    except (ReconError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
