"""
Image-space correction operators of the unrolled network.

Each kind declares its parameter layout, its seeded initialization and
how it is recorded on a gradient tape. The numpy-only entry points
(``small_cnn_apply``, ``apply_correction``) record on a throwaway tape so
inference and training share one code path.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Tuple, Type

import numpy as np

from src.core.constants import CONV_KERNEL_SIZE, DEFAULT_STEP_SIZE
from src.core.exceptions import DimensionError, ParameterError
from src.learn.tape import GradientTape, Variable

ParameterShapes = List[Tuple[str, Tuple[int, ...]]]


class CorrectionKind(str, Enum):
    """Correction operator family."""
    GRADIENT_STEP = "gradient_step"
    SMALL_CNN = "small_cnn"


class GradientStepCorrection:
    """Adds tau * u to every buffer channel (one learned step size)."""

    kind = CorrectionKind.GRADIENT_STEP

    @staticmethod
    def parameter_shapes(buffer_size: int, filters: int) -> ParameterShapes:
        return [("tau", (1,))]

    @staticmethod
    def initial_parameters(buffer_size: int, filters: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        return {"tau": np.array([DEFAULT_STEP_SIZE])}

    @staticmethod
    def record(tape: GradientTape, params: Dict[str, Variable], buffer: Variable, u: Variable) -> Variable:
        step = tape.scale(u, params["tau"])
        return tape.repeat(step, buffer.shape[0])


class SmallCnnCorrection:
    """
    Two-layer convolutional correction.

    Planes [Re b0, Im b0, ..., Re u, Im u] -> conv 3x3 (C filters) -> ReLU
    -> conv 3x3 (2B filters) -> B complex channels.
    """

    kind = CorrectionKind.SMALL_CNN

    @staticmethod
    def parameter_shapes(buffer_size: int, filters: int) -> ParameterShapes:
        k = CONV_KERNEL_SIZE
        in_planes = 2 * buffer_size + 2
        out_planes = 2 * buffer_size
        return [
            ("conv1.weight", (filters, in_planes, k, k)),
            ("conv1.bias", (filters,)),
            ("conv2.weight", (out_planes, filters, k, k)),
            ("conv2.bias", (out_planes,)),
        ]

    @classmethod
    def initial_parameters(cls, buffer_size: int, filters: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        params = {}
        for name, shape in cls.parameter_shapes(buffer_size, filters):
            if name.endswith("bias"):
                params[name] = np.zeros(shape)
            else:
                bound = 1.0 / np.sqrt(shape[1] * shape[2] * shape[3])
                params[name] = rng.uniform(-bound, bound, size=shape)
        return params

    @staticmethod
    def record(tape: GradientTape, params: Dict[str, Variable], buffer: Variable, u: Variable) -> Variable:
        planes = tape.concat([tape.to_channels(buffer), tape.to_channels(tape.repeat(u, 1))])
        hidden = tape.relu(tape.conv2d(planes, params["conv1.weight"], params["conv1.bias"]))
        out = tape.conv2d(hidden, params["conv2.weight"], params["conv2.bias"])
        return tape.from_channels(out)


# Registry of available correction kinds
CORRECTION_REGISTRY: Dict[CorrectionKind, Type] = {
    CorrectionKind.GRADIENT_STEP: GradientStepCorrection,
    CorrectionKind.SMALL_CNN: SmallCnnCorrection,
}


def get_correction(kind) -> Type:
    try:
        return CORRECTION_REGISTRY[CorrectionKind(kind)]
    except ValueError:
        available = ", ".join(k.value for k in CORRECTION_REGISTRY)
        raise ParameterError(f"Unknown correction kind: '{kind}'. Available: {available}") from None


@dataclass(frozen=True, eq=False)
class CorrectionOp:
    """
    One parameterized correction block.

    Attributes:
        kind: Correction family
        params: Flat real parameter vector in layout order
        buffer_size: Number of complex buffer channels B
        filters: Hidden channels C (unused by gradient_step)
    """
    kind: CorrectionKind
    params: np.ndarray
    buffer_size: int
    filters: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", CorrectionKind(self.kind))
        if self.buffer_size < 1:
            raise ParameterError(f"buffer size must be >= 1, received {self.buffer_size}")
        if self.kind is CorrectionKind.SMALL_CNN and self.filters < 1:
            raise ParameterError(f"small_cnn needs >= 1 filter, received {self.filters}")
        params = np.array(self.params, dtype=np.float64).ravel()
        expected = self.n_parameters
        if params.size != expected:
            raise DimensionError(f"{self.kind.value} expects {expected} parameters, received {params.size}")
        if not np.isfinite(params).all():
            raise ParameterError("correction parameters must be finite")
        params.flags.writeable = False
        object.__setattr__(self, "params", params)

    @property
    def layout(self) -> ParameterShapes:
        return get_correction(self.kind).parameter_shapes(self.buffer_size, self.filters)

    @property
    def n_parameters(self) -> int:
        return int(sum(np.prod(shape) for _, shape in self.layout))

    def arrays(self) -> Dict[str, np.ndarray]:
        """Parameters unflattened by name."""
        arrays, offset = {}, 0
        for name, shape in self.layout:
            size = int(np.prod(shape))
            arrays[name] = self.params[offset:offset + size].reshape(shape)
            offset += size
        return arrays

    @classmethod
    def from_arrays(cls, kind, arrays: Dict[str, np.ndarray], buffer_size: int, filters: int = 0) -> "CorrectionOp":
        layout = get_correction(kind).parameter_shapes(buffer_size, filters)
        missing = [name for name, _ in layout if name not in arrays]
        if missing:
            raise DimensionError(f"missing correction parameters: {missing}")
        for name, shape in layout:
            if np.shape(arrays[name]) != shape:
                raise DimensionError(f"parameter {name} has shape {np.shape(arrays[name])}, expected {shape}")
        flat = np.concatenate([np.ravel(arrays[name]) for name, _ in layout])
        return cls(kind=kind, params=flat, buffer_size=buffer_size, filters=filters)

    @classmethod
    def initialize(cls, kind, buffer_size: int, filters: int, rng: np.random.Generator) -> "CorrectionOp":
        arrays = get_correction(kind).initial_parameters(buffer_size, filters, rng)
        return cls.from_arrays(kind, arrays, buffer_size, filters)

    def zeros_like(self) -> "CorrectionOp":
        return CorrectionOp(self.kind, np.zeros_like(self.params), self.buffer_size, self.filters)


def record_correction(
    tape: GradientTape, op: CorrectionOp, params: Dict[str, Variable], buffer: Variable, u: Variable
) -> Variable:
    """Record op on the tape; returns the (B, H, W) additive buffer update."""
    return get_correction(op.kind).record(tape, params, buffer, u)


def apply_correction(op: CorrectionOp, buffer: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Buffer update of any kind, computed without gradients."""
    buffer = np.asarray(buffer, dtype=np.complex128)
    u = np.asarray(u, dtype=np.complex128)
    if buffer.ndim != 3 or buffer.shape[0] != op.buffer_size:
        raise DimensionError(f"buffer must be ({op.buffer_size}, H, W), received {buffer.shape}")
    if u.shape != buffer.shape[1:]:
        raise DimensionError(f"u shape {u.shape} does not match buffer images {buffer.shape[1:]}")
    tape = GradientTape()
    params = {name: tape.constant(value) for name, value in op.arrays().items()}
    return record_correction(tape, op, params, tape.constant(buffer), tape.constant(u)).value


def small_cnn_apply(op: CorrectionOp, buffer: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    B-channel update of a small_cnn correction.

    Args:
        op: small_cnn correction
        buffer: (B, H, W) complex buffer
        u: (H, W) complex data-consistency image

    Returns:
        (B, H, W) complex update
    """
    if op.kind is not CorrectionKind.SMALL_CNN:
        raise ParameterError(f"small_cnn_apply needs a small_cnn correction, received {op.kind.value}")
    return apply_correction(op, buffer, u)
