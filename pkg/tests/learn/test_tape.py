"""
Tests for the gradient tape and backward().
"""

import numpy as np
import pytest

from src.core.exceptions import TapeError
from src.core.linalg import inner_product
from src.core.types import KSpaceSamples
from src.learn import GradientTape, backward, finite_diff_grad, normalized_max_error
from src.learn.functional import conv2d
from src.nufft import nufft_adjoint, nufft_forward_array


def real_loss_grad(value: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Cotangent of L = sum(weights * |value|^2)."""
    return 2.0 * weights * value


class TestGradientTape:
    """Tests for tape recording and consumption."""

    def test_zero_output_grad(self, rng):
        tape = GradientTape()
        p = tape.parameter("p", rng.standard_normal((2, 3)))
        out = tape.relu(tape.add(p, tape.constant(np.ones((2, 3)))))

        grads = tape.gradients(np.zeros(out.shape))

        assert not grads["p"].any()

    def test_scale_gradient_is_real_inner_product(self, rng):
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        tape = GradientTape()
        p = tape.parameter("p", np.array([0.7]))
        tape.scale(tape.constant(x), p)

        grad = backward(tape, g)

        assert grad.shape == (1,)
        assert grad[0] == pytest.approx(inner_product(x, g).real, rel=1e-12)

    def test_nufft_forward_vjp_is_adjoint(self, radial_plan_16, rng):
        x = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        g = rng.standard_normal(radial_plan_16.n_samples) + 1j * rng.standard_normal(radial_plan_16.n_samples)
        tape = GradientTape()
        tape.nufft_forward(radial_plan_16, tape.parameter("x", x))

        grad = tape.gradients(g)["x"]
        expected = nufft_adjoint(radial_plan_16, KSpaceSamples(g)).data

        assert np.max(np.abs(grad - expected)) <= 1e-12 * np.max(np.abs(expected))

    def test_nufft_adjoint_vjp_is_forward(self, radial_plan_16, rng):
        y = rng.standard_normal(radial_plan_16.n_samples) + 0j
        g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        tape = GradientTape()
        tape.nufft_adjoint(radial_plan_16, tape.parameter("y", y))

        np.testing.assert_array_equal(tape.gradients(g)["y"], nufft_forward_array(radial_plan_16, g))

    def test_fan_out_accumulates(self):
        tape = GradientTape()
        p = tape.parameter("p", np.array([2.0]))
        tape.add(p, tape.add(p, p))

        assert backward(tape, np.array([1.0]))[0] == 3.0

    def test_real_parameters_get_real_gradients(self, rng):
        tape = GradientTape()
        p = tape.parameter("p", np.array([0.5]))
        tape.scale(tape.constant(rng.standard_normal(3) + 1j * rng.standard_normal(3)), p)

        grads = tape.gradients(np.ones(3, dtype=np.complex128))

        assert not np.iscomplexobj(grads["p"])

    def test_unused_parameter_gets_zero(self):
        tape = GradientTape()
        tape.parameter("unused", np.ones(3))
        p = tape.parameter("p", np.ones(2))
        tape.relu(p)

        grads = tape.gradients(np.ones(2))

        np.testing.assert_array_equal(grads["unused"], np.zeros(3))

    def test_explicit_output(self):
        tape = GradientTape()
        p = tape.parameter("p", np.array([1.0]))
        doubled = tape.add(p, p)
        tape.relu(tape.constant(np.array([5.0])))

        assert tape.gradients(np.array([1.0]), output=doubled)["p"][0] == 2.0

    def test_consumed_once(self):
        tape = GradientTape()
        tape.relu(tape.parameter("p", np.ones(2)))
        tape.gradients(np.ones(2))

        assert tape.consumed
        with pytest.raises(TapeError):
            tape.gradients(np.ones(2))
        with pytest.raises(TapeError):
            tape.constant(np.ones(2))

    def test_empty_tape(self):
        with pytest.raises(TapeError):
            GradientTape().gradients(np.ones(1))

    def test_shape_mismatch(self):
        tape = GradientTape()
        tape.relu(tape.parameter("p", np.ones(2)))
        with pytest.raises(TapeError):
            tape.gradients(np.ones(3))

    def test_duplicate_parameter(self):
        tape = GradientTape()
        tape.parameter("p", np.ones(1))
        with pytest.raises(TapeError):
            tape.parameter("p", np.ones(1))

    def test_foreign_variable(self):
        other = GradientTape().constant(np.ones(2))
        tape = GradientTape()
        with pytest.raises(TapeError):
            tape.relu(other)


class TestPrimitiveGradients:
    """Each primitive against central finite differences of a scalar loss."""

    def test_conv2d(self, rng):
        x = rng.standard_normal((3, 5, 6))
        weight = rng.standard_normal((2, 3, 3, 3))
        bias = rng.standard_normal(2)
        loss_weights = rng.uniform(0.5, 1.5, (2, 5, 6))
        shapes = [x.shape, weight.shape, bias.shape]
        sizes = np.cumsum([np.prod(s) for s in shapes])[:-1]

        def unpack(flat):
            return [part.reshape(shape) for part, shape in zip(np.split(flat, sizes), shapes)]

        def loss(flat):
            xv, wv, bv = unpack(flat)
            return float(np.sum(loss_weights * conv2d(xv, wv, bv) ** 2))

        tape = GradientTape()
        out = tape.conv2d(tape.parameter("x", x), tape.parameter("w", weight), tape.parameter("b", bias))
        analytic = backward(tape, real_loss_grad(out.value, loss_weights))
        numeric = finite_diff_grad(loss, np.concatenate([x.ravel(), weight.ravel(), bias.ravel()]))

        assert normalized_max_error(analytic, numeric) < 1e-6

    def test_channel_layout_chain(self, rng):
        buffer = rng.standard_normal((2, 4, 4)) + 1j * rng.standard_normal((2, 4, 4))
        loss_weights = rng.uniform(0.5, 1.5, (4, 4))

        def forward(tape, s):
            b = tape.constant(buffer)
            planes = tape.concat([tape.to_channels(b), tape.to_channels(tape.repeat(tape.take(b, 1), 1))])
            z = tape.from_channels(tape.relu(tape.scale(planes, s)))
            return tape.take(tape.sub(z, tape.repeat(tape.take(b, 0), 3)), 2)

        def loss(flat):
            tape = GradientTape()
            out = forward(tape, tape.constant(flat)).value
            return float(np.sum(loss_weights * np.abs(out) ** 2))

        tape = GradientTape()
        out = forward(tape, tape.parameter("s", np.array([1.3])))
        analytic = backward(tape, real_loss_grad(out.value, loss_weights))
        numeric = finite_diff_grad(loss, np.array([1.3]))

        assert normalized_max_error(analytic, numeric) < 1e-6

    def test_weight(self, rng):
        w = rng.uniform(0.5, 2.0, 5)
        tape = GradientTape()
        p = tape.parameter("p", np.array([0.4]))
        tape.weight(tape.scale(tape.constant(np.ones(5) + 0j), p), w)

        assert backward(tape, np.ones(5))[0] == pytest.approx(w.sum())
