"""
Unrolled reconstruction model and its factory.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

import numpy as np
import structlog

from src.core.constants import DEFAULT_BUFFER_SIZE, DEFAULT_FILTERS, DEFAULT_UNROLLED_ITERATIONS
from src.core.exceptions import DimensionError, ParameterError

from .correction import CorrectionKind, CorrectionOp, get_correction

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class UnrolledModel:
    """
    K unrolled iterations with one correction operator each.

    Attributes:
        n_iter_K: Unrolled iterations
        buffer_size_B: Complex channels of the primal buffer
        corrections: K correction operators, applied in order
        use_dc: Density-compensated data consistency when True,
            max-normalized residual otherwise
    """
    n_iter_K: int
    buffer_size_B: int
    corrections: Sequence[CorrectionOp]
    use_dc: bool = True

    def __post_init__(self):
        corrections = tuple(self.corrections)
        if self.n_iter_K < 1:
            raise ParameterError(f"n_iter_K must be >= 1, received {self.n_iter_K}")
        if self.buffer_size_B < 1:
            raise ParameterError(f"buffer_size_B must be >= 1, received {self.buffer_size_B}")
        if len(corrections) != self.n_iter_K:
            raise DimensionError(f"expected {self.n_iter_K} corrections, received {len(corrections)}")
        for k, op in enumerate(corrections):
            if op.buffer_size != self.buffer_size_B:
                raise DimensionError(
                    f"correction {k} built for buffer size {op.buffer_size}, model uses {self.buffer_size_B}"
                )
        object.__setattr__(self, "corrections", corrections)
        object.__setattr__(self, "use_dc", bool(self.use_dc))

    @property
    def kind(self) -> CorrectionKind:
        return self.corrections[0].kind

    @property
    def filters(self) -> int:
        return self.corrections[0].filters

    @property
    def n_parameters(self) -> int:
        return sum(op.n_parameters for op in self.corrections)

    def parameter_names(self) -> List[str]:
        return [f"corrections.{k}.{name}" for k, op in enumerate(self.corrections) for name, _ in op.layout]

    def named_parameters(self) -> Dict[str, np.ndarray]:
        named = {}
        for k, op in enumerate(self.corrections):
            for name, value in op.arrays().items():
                named[f"corrections.{k}.{name}"] = value
        return named

    def flatten(self) -> np.ndarray:
        """All parameters as one vector, iteration-major, layout order within."""
        return np.concatenate([op.params for op in self.corrections])

    def with_parameters(self, flat: np.ndarray) -> "UnrolledModel":
        """Copy of the model with a new flat parameter vector."""
        flat = np.asarray(flat, dtype=np.float64).ravel()
        if flat.size != self.n_parameters:
            raise DimensionError(f"model has {self.n_parameters} parameters, received {flat.size}")
        corrections, offset = [], 0
        for op in self.corrections:
            size = op.n_parameters
            corrections.append(CorrectionOp(op.kind, flat[offset:offset + size], op.buffer_size, op.filters))
            offset += size
        return UnrolledModel(self.n_iter_K, self.buffer_size_B, corrections, self.use_dc)

    def zeroed(self) -> "UnrolledModel":
        return self.with_parameters(np.zeros(self.n_parameters))


def create_model(
    kind: str = CorrectionKind.SMALL_CNN.value,
    n_iter: int = DEFAULT_UNROLLED_ITERATIONS,
    buffer_size: int = DEFAULT_BUFFER_SIZE,
    filters: int = DEFAULT_FILTERS,
    use_dc: bool = True,
    seed: int = 0,
) -> UnrolledModel:
    """
    Create a freshly initialized model.

    Raises:
        ParameterError: unknown kind or invalid sizes
    """
    get_correction(kind)
    if n_iter < 1:
        raise ParameterError(f"n_iter must be >= 1, received {n_iter}")
    rng = np.random.default_rng(seed)
    corrections = [CorrectionOp.initialize(kind, buffer_size, filters, rng) for _ in range(n_iter)]
    model = UnrolledModel(n_iter, buffer_size, corrections, use_dc)
    logger.info(
        "model_created",
        kind=str(CorrectionKind(kind).value),
        n_iter=n_iter,
        buffer_size=buffer_size,
        filters=filters,
        use_dc=use_dc,
        parameters=model.n_parameters,
    )
    return model


def build_model(settings: Any, seed: int = 0) -> UnrolledModel:
    """
    Create a model from a settings object.

    Args:
        settings: Object with kind, n_iter, buffer_size, filters and use_dc
            attributes (ModelSettings)
        seed: Initialization seed
    """
    return create_model(
        kind=settings.kind,
        n_iter=settings.n_iter,
        buffer_size=settings.buffer_size,
        filters=settings.filters,
        use_dc=settings.use_dc,
        seed=seed,
    )
