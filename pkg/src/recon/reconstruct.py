"""
Reconstruction algorithms: density-compensated adjoint, residual data
consistency, and the unrolled primal-only network.
"""

from typing import Optional

import numpy as np

from src.core.exceptions import DegenerateInputError, DimensionError, ParameterError
from src.core.types import ComplexImage, DcWeights, KSpaceSamples
from src.learn.tape import GradientTape
from src.nufft.operators import nufft_adjoint_array
from src.nufft.plan import NufftPlan

from .correction import record_correction
from .model import UnrolledModel


def _check_lengths(plan: NufftPlan, d: Optional[DcWeights], y: KSpaceSamples) -> None:
    if len(y) != plan.n_samples:
        raise DimensionError(f"received {len(y)} samples, plan expects {plan.n_samples}")
    if d is not None and len(d) != len(y):
        raise DimensionError(f"{len(d)} DC weights for {len(y)} samples")


def dc_adjoint_recon(plan: NufftPlan, d: DcWeights, y: KSpaceSamples) -> ComplexImage:
    """Density-compensated adjoint F^H(d * y)."""
    _check_lengths(plan, d, y)
    return ComplexImage(nufft_adjoint_array(plan, y.values * d.values))


def consistency_weights(y: KSpaceSamples, d: Optional[DcWeights]):
    """d when given, else the scalar 1 / max|y|."""
    if d is not None:
        return d.values
    peak = float(np.max(np.abs(y.values))) if len(y) else 0.0
    if peak == 0.0:
        raise DegenerateInputError("max|y| is 0; cannot normalize without DC weights")
    return 1.0 / peak


def data_consistency_residual(y: KSpaceSamples, y_k: KSpaceSamples, d: Optional[DcWeights] = None) -> KSpaceSamples:
    """
    Weighted measurement residual.

    d * (y - y_k) with DC weights, (y - y_k) / max|y| without.

    Raises:
        DimensionError: length mismatch
        DegenerateInputError: max|y| = 0 without DC weights
    """
    if len(y) != len(y_k):
        raise DimensionError(f"residual of {len(y)} and {len(y_k)} samples")
    if d is not None and len(d) != len(y):
        raise DimensionError(f"{len(d)} DC weights for {len(y)} samples")
    return KSpaceSamples((y.values - y_k.values) * consistency_weights(y, d))


def unrolled_forward(
    model: UnrolledModel,
    plan: NufftPlan,
    d: Optional[DcWeights],
    y: KSpaceSamples,
    tape: Optional[GradientTape] = None,
) -> ComplexImage:
    """
    Run the unrolled network.

    The buffer starts as B copies of the (density-compensated or
    normalized) adjoint. Iteration k computes u = F^H(residual(y, F x_k))
    with x_k the first buffer channel and adds correction_k(buffer, u) to
    the buffer. The output is the first channel after K iterations.

    Every step is recorded on ``tape`` (a private one when None) with the
    model parameters registered as ``corrections.<k>.<name>``, so the same
    call serves inference and training.

    Raises:
        ParameterError: d given without use_dc, or missing with it
    """
    if model.use_dc and d is None:
        raise ParameterError("model uses density compensation but no DC weights were given")
    if not model.use_dc and d is not None:
        raise ParameterError("model without density compensation received DC weights")
    _check_lengths(plan, d, y)
    tape = GradientTape() if tape is None else tape

    weights = consistency_weights(y, d)
    y_var = tape.constant(y.values)
    x0 = tape.nufft_adjoint(plan, tape.weight(y_var, weights))
    buffer = tape.repeat(x0, model.buffer_size_B)

    for k, op in enumerate(model.corrections):
        params = {name: tape.parameter(f"corrections.{k}.{name}", value) for name, value in op.arrays().items()}
        x_k = tape.take(buffer, 0)
        residual = tape.weight(tape.sub(y_var, tape.nufft_forward(plan, x_k)), weights)
        u = tape.nufft_adjoint(plan, residual)
        buffer = tape.add(buffer, record_correction(tape, op, params, buffer, u))

    return ComplexImage(tape.take(buffer, 0).value)
