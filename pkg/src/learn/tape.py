"""
Reverse-mode differentiation by tape.

Every primitive applied through a GradientTape records its output value
and a vector-Jacobian product closure. ``backward`` walks the record in
reverse once and returns parameter gradients.

Gradient convention for complex values: for a real loss L of z the
stored cotangent is dL/dRe(z) + i*dL/dIm(z). A complex-linear operator A
then has VJP A^H, and real parameters receive real gradients.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import TapeError
from src.nufft.operators import nufft_adjoint_array, nufft_forward_array
from src.nufft.plan import NufftPlan

from .functional import (
    channels_to_complex,
    complex_to_channels,
    conv2d,
    conv2d_input_grad,
    conv2d_weight_grad,
)

VJP = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


@dataclass(frozen=True)
class Variable:
    """Handle to a value recorded on a tape."""
    tape: "GradientTape"
    index: int

    @property
    def value(self) -> np.ndarray:
        return self.tape._values[self.index]

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape


@dataclass(frozen=True)
class _Node:
    inputs: Tuple[int, ...]
    vjp: VJP


class GradientTape:
    """
    Ordered record of primitive applications.

    Parameters are registered by name; their order of registration is the
    order of the flat gradient vector. The record may be consumed once.
    """

    def __init__(self):
        self._values: List[np.ndarray] = []
        self._nodes: List[Optional[_Node]] = []
        self._parameters: Dict[str, int] = {}
        self._consumed = False

    def __len__(self) -> int:
        return len(self._values)

    @property
    def consumed(self) -> bool:
        return self._consumed

    @property
    def parameter_names(self) -> List[str]:
        return list(self._parameters)

    def _record(self, value: np.ndarray, inputs: Sequence[Variable], vjp: Optional[VJP]) -> Variable:
        if self._consumed:
            raise TapeError("cannot record on a consumed tape")
        for var in inputs:
            if var.tape is not self:
                raise TapeError("variable belongs to a different tape")
        self._values.append(value)
        self._nodes.append(_Node(tuple(v.index for v in inputs), vjp) if vjp is not None else None)
        return Variable(self, len(self._values) - 1)

    # ----- leaves -----

    def parameter(self, name: str, value: np.ndarray) -> Variable:
        """Register a trainable leaf."""
        if name in self._parameters:
            raise TapeError(f"parameter {name!r} registered twice")
        var = self._record(np.array(value, copy=True), (), None)
        self._parameters[name] = var.index
        return var

    def constant(self, value: np.ndarray) -> Variable:
        """Leaf that receives no gradient."""
        return self._record(np.asarray(value), (), None)

    # ----- elementwise -----

    def add(self, a: Variable, b: Variable) -> Variable:
        return self._record(a.value + b.value, (a, b), lambda g: (g, g))

    def sub(self, a: Variable, b: Variable) -> Variable:
        return self._record(a.value - b.value, (a, b), lambda g: (g, -g))

    def weight(self, a: Variable, w: np.ndarray) -> Variable:
        """Multiply by a fixed real array (density compensation, normalization)."""
        w = np.asarray(w, dtype=np.float64)
        return self._record(a.value * w, (a,), lambda g: (g * w,))

    def scale(self, a: Variable, s: Variable) -> Variable:
        """Multiply by a real scalar variable."""
        a_value, s_value = a.value, s.value

        def vjp(g):
            return g * s_value, np.reshape(np.real(np.vdot(a_value, g)), np.shape(s_value))

        return self._record(a_value * s_value, (a, s), vjp)

    def relu(self, a: Variable) -> Variable:
        mask = a.value > 0
        return self._record(np.where(mask, a.value, 0.0), (a,), lambda g: (g * mask,))

    # ----- channel layout -----

    def repeat(self, a: Variable, count: int) -> Variable:
        """(H, W) -> (count, H, W)."""
        value = np.repeat(a.value[None], count, axis=0)
        return self._record(value, (a,), lambda g: (g.sum(axis=0),))

    def take(self, a: Variable, channel: int) -> Variable:
        """(C, H, W) -> (H, W) at one channel."""
        shape, dtype = a.shape, a.value.dtype

        def vjp(g):
            out = np.zeros(shape, dtype=np.result_type(dtype, g.dtype))
            out[channel] = g
            return (out,)

        return self._record(a.value[channel].copy(), (a,), vjp)

    def concat(self, parts: Sequence[Variable]) -> Variable:
        """Concatenate along axis 0."""
        sizes = np.cumsum([p.shape[0] for p in parts])[:-1]
        return self._record(
            np.concatenate([p.value for p in parts], axis=0),
            tuple(parts),
            lambda g: tuple(np.split(g, sizes, axis=0)),
        )

    def to_channels(self, z: Variable) -> Variable:
        """(B, H, W) complex -> (2B, H, W) real planes."""
        return self._record(complex_to_channels(z.value), (z,), lambda g: (channels_to_complex(g),))

    def from_channels(self, r: Variable) -> Variable:
        """(2B, H, W) real planes -> (B, H, W) complex."""
        return self._record(channels_to_complex(r.value), (r,), lambda g: (complex_to_channels(g),))

    # ----- layers and operators -----

    def conv2d(self, x: Variable, weight: Variable, bias: Variable) -> Variable:
        x_value, w_value = x.value, weight.value

        def vjp(g):
            return (
                conv2d_input_grad(g, w_value),
                conv2d_weight_grad(g, x_value, w_value.shape[-1]),
                g.sum(axis=(1, 2)),
            )

        return self._record(conv2d(x_value, w_value, bias.value), (x, weight, bias), vjp)

    def nufft_forward(self, plan: NufftPlan, x: Variable) -> Variable:
        return self._record(
            nufft_forward_array(plan, x.value), (x,), lambda g: (nufft_adjoint_array(plan, g),)
        )

    def nufft_adjoint(self, plan: NufftPlan, y: Variable) -> Variable:
        return self._record(
            nufft_adjoint_array(plan, y.value), (y,), lambda g: (nufft_forward_array(plan, g),)
        )

    # ----- reverse pass -----

    def gradients(self, output_grad: np.ndarray, output: Optional[Variable] = None) -> Dict[str, np.ndarray]:
        """
        Consume the tape and return the gradient of every parameter.

        Args:
            output_grad: Cotangent of the output (same shape)
            output: Seeded variable; defaults to the last recorded value

        Raises:
            TapeError: tape already consumed, empty, or cotangent shape mismatch
        """
        if self._consumed:
            raise TapeError("tape already consumed")
        if not self._values:
            raise TapeError("tape is empty")
        seed = len(self._values) - 1 if output is None else output.index
        output_grad = np.asarray(output_grad)
        if output_grad.shape != self._values[seed].shape:
            raise TapeError(
                f"output gradient shape {output_grad.shape} does not match output {self._values[seed].shape}"
            )
        self._consumed = True

        cotangents: Dict[int, np.ndarray] = {seed: output_grad}
        for index in range(seed, -1, -1):
            grad = cotangents.pop(index, None)
            node = self._nodes[index]
            if grad is None:
                continue
            if node is None:
                cotangents[index] = grad
                continue
            for input_index, input_grad in zip(node.inputs, node.vjp(grad)):
                if input_grad is None:
                    continue
                if input_index in cotangents:
                    cotangents[input_index] = cotangents[input_index] + input_grad
                else:
                    cotangents[input_index] = input_grad

        result = {}
        for name, index in self._parameters.items():
            value = self._values[index]
            grad = cotangents.get(index)
            if grad is None:
                grad = np.zeros_like(value)
            elif not np.iscomplexobj(value):
                grad = np.real(grad)
            result[name] = np.reshape(grad, value.shape)
        return result


def backward(tape: GradientTape, output_grad: np.ndarray, output: Optional[Variable] = None) -> np.ndarray:
    """Flat parameter gradient, in parameter-registration order."""
    grads = tape.gradients(output_grad, output)
    if not grads:
        return np.zeros(0)
    return np.concatenate([np.ravel(g) for g in grads.values()])
