"""
Tests for the gridding NUFFT: kernel, plan, forward/adjoint and the NDFT oracle.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from src.core.constants import KERNEL_TABLE_RESOLUTION
from src.core.exceptions import DimensionError, DomainError, ParameterError
from src.core.linalg import FFTDirection, fft2, inner_product, norm
from src.core.types import ComplexImage, KSpaceSamples, Trajectory
from src.nufft import (
    beatty_beta,
    kaiser_bessel,
    kaiser_bessel_transform,
    make_kernel,
    make_plan,
    ndft_adjoint,
    ndft_forward,
    nufft_adjoint,
    nufft_forward,
)
from src.trajectories.generators import cartesian_full, radial, spiral


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def adjoint_mismatch(plan, x: ComplexImage, y: KSpaceSamples) -> float:
    fx = nufft_forward(plan, x)
    lhs = inner_product(fx, y)
    rhs = inner_product(x, nufft_adjoint(plan, y))
    return abs(lhs - rhs) / (norm(fx) * norm(y))


class TestKernel:
    """Tests for the Kaiser-Bessel kernel table."""

    def test_beatty_beta(self):
        expected = np.pi * np.sqrt((6 / 2.0) ** 2 * 1.5 ** 2 - 0.8)

        assert beatty_beta(6, 2.0) == pytest.approx(expected)

    def test_normalized_at_zero(self):
        assert kaiser_bessel(np.array([0.0]), 6, 10.0)[0] == pytest.approx(1.0)

    def test_table(self):
        kernel = make_kernel(6, 2.0)

        assert kernel.table.size == KERNEL_TABLE_RESOLUTION * 3 + 1
        assert (kernel.table > 0).all()
        assert kernel.table[0] == pytest.approx(1.0)
        assert (np.diff(kernel.table) <= 0).all()

    def test_evaluate_symmetric_and_open_support(self):
        kernel = make_kernel(4, 2.0)
        u = np.array([-1.3, 1.3, 2.0, -2.0, 2.5])
        values = kernel.evaluate(u)

        assert values[0] == values[1]
        assert values[2] == 0.0 and values[3] == 0.0 and values[4] == 0.0

    def test_evaluate_matches_closed_form(self):
        kernel = make_kernel(6, 2.0)
        u = np.linspace(-2.9, 2.9, 101)

        np.testing.assert_allclose(kernel.evaluate(u), kaiser_bessel(u, 6, kernel.beta), atol=1e-4)

    @pytest.mark.parametrize("s", [0.0, 0.1, 0.25, 0.5, 0.9])
    def test_transform_matches_integral(self, s):
        beta = beatty_beta(6, 2.0)
        def integrand(u):
            return float(kaiser_bessel(u, 6, beta) * np.cos(2 * np.pi * u * s))

        expected, _ = quad(integrand, -3.0, 3.0, limit=200)

        assert kaiser_bessel_transform(np.array([s]), 6, beta)[0] == pytest.approx(expected, rel=1e-7, abs=1e-12)

    def test_transform_continuous_at_cutoff(self):
        beta = beatty_beta(6, 2.0)
        cutoff = beta / (6 * np.pi)
        values = kaiser_bessel_transform(np.array([cutoff - 1e-9, cutoff, cutoff + 1e-9]), 6, beta)

        np.testing.assert_allclose(values, values[1], rtol=1e-6)

    def test_footprint_is_transform(self):
        kernel = make_kernel(6, 2.0)
        s = np.linspace(-0.25, 0.25, 9)

        np.testing.assert_array_equal(kernel.footprint(s), kaiser_bessel_transform(s, 6, kernel.beta))

    def test_width_too_small(self):
        with pytest.raises(ParameterError):
            make_kernel(1, 2.0)

    def test_non_integer_width(self):
        with pytest.raises(ParameterError):
            make_kernel(4.5, 2.0)


class TestMakePlan:
    """Tests for make_plan."""

    def test_cartesian_plan_builds(self):
        plan = make_plan(cartesian_full(8, 8), 8, 8, oversampling_sigma=2.0, width_J=6)

        assert plan.oversampled_shape == (16, 16)
        assert plan.interp_indices.shape == (64, 36)
        assert (plan.interp_weights.sum(axis=1) > 0).all()
        assert (plan.deapod > 0).all()
        assert plan.interp_indices.min() >= 0 and plan.interp_indices.max() < 256

    def test_domain_error_on_upper_boundary(self):
        with pytest.raises(DomainError):
            make_plan(np.array([[0.0, 0.0], [0.5, 0.1]]), 8, 8)

    @pytest.mark.parametrize("sigma,width", [(1.2, 6), (2.0, 1)])
    def test_parameter_errors(self, sigma, width):
        with pytest.raises(ParameterError):
            make_plan(radial(2, 8), 8, 8, oversampling_sigma=sigma, width_J=width)

    def test_bad_norm(self):
        with pytest.raises(ParameterError):
            make_plan(radial(2, 8), 8, 8, norm="forward")

    def test_oversampled_shape_rounds(self):
        plan = make_plan(radial(2, 8), 10, 7, oversampling_sigma=1.25)

        assert plan.oversampled_shape == (12, 9)

    def test_plan_determinism(self):
        traj = spiral(3, 40)
        a = make_plan(traj, 12, 12)
        b = make_plan(traj, 12, 12)

        np.testing.assert_array_equal(a.interp_indices, b.interp_indices)
        np.testing.assert_array_equal(a.interp_weights, b.interp_weights)
        np.testing.assert_array_equal(a.deapod, b.deapod)

    def test_plan_arrays_read_only(self, radial_plan_16):
        with pytest.raises(ValueError):
            radial_plan_16.interp_weights[0, 0] = 1.0

    def test_sparse_matrix_matches_tables(self, radial_plan_16):
        dense = radial_plan_16.interp_matrix.toarray()
        i = 5

        for index, weight in zip(radial_plan_16.interp_indices[i], radial_plan_16.interp_weights[i]):
            assert dense[i, index] >= weight - 1e-15


class TestNdft:
    """Tests for the exact NDFT oracle."""

    def test_zero_frequency_is_sum(self, random_image):
        x = random_image(6, 5)
        y = ndft_forward(x, Trajectory([[0.0, 0.0]]))

        assert y.values[0] == pytest.approx(x.data.sum(), abs=1e-12)

    def test_delta_at_center(self):
        data = np.zeros((8, 8))
        data[4, 4] = 1.0
        y = ndft_forward(ComplexImage(data), spiral(2, 30))

        np.testing.assert_allclose(y.values, np.ones(60), atol=1e-14)

    def test_matches_fft_on_cartesian_grid(self, random_image):
        x = random_image(8, 8)
        y = ndft_forward(x, cartesian_full(8, 8))
        # centered pixels and centered frequencies: shift both sides of the plain FFT
        spectrum = np.fft.fftshift(fft2(ComplexImage(np.fft.ifftshift(x.data)), FFTDirection.FORWARD).data)

        assert relative_error(y.values, spectrum.ravel()) < 1e-12

    def test_adjoint_of_zero_frequency(self):
        img = ndft_adjoint(KSpaceSamples([1.0]), Trajectory([[0.0, 0.0]]), (3, 4))

        np.testing.assert_allclose(img.data, np.ones((3, 4)), atol=1e-15)

    def test_adjoint_of_zero(self):
        traj = radial(3, 8)
        img = ndft_adjoint(KSpaceSamples.zeros(len(traj)), traj, (4, 4))

        assert not img.data.any()

    def test_adjoint_identity(self, random_image, random_samples):
        traj = spiral(2, 50)
        x, y = random_image(8, 8), random_samples(len(traj))
        lhs = inner_product(ndft_forward(x, traj), y)
        rhs = inner_product(x, ndft_adjoint(y, traj, (8, 8)))

        assert abs(lhs - rhs) < 1e-12 * norm(x) * norm(y) * 64

    def test_adjoint_length_mismatch(self):
        with pytest.raises(DimensionError):
            ndft_adjoint(KSpaceSamples.zeros(3), radial(1, 4), (4, 4))


class TestNufftForward:
    """Tests for nufft_forward against the oracle."""

    def test_zero_image(self, radial_plan_16):
        y = nufft_forward(radial_plan_16, ComplexImage.zeros(16, 16))

        assert not y.values.any()

    def test_linearity(self, radial_plan_16, random_image):
        x = random_image(16, 16)
        y1 = nufft_forward(radial_plan_16, x)
        y2 = nufft_forward(radial_plan_16, ComplexImage(2 * x.data))

        np.testing.assert_array_equal(y2.values, 2 * y1.values)

    def test_oracle_random_points(self, rng, random_image):
        traj = Trajectory(rng.uniform(-0.5, 0.5, size=(500, 2)))
        x = random_image(32, 32)
        plan = make_plan(traj, 32, 32, oversampling_sigma=2.0, width_J=6)

        assert relative_error(nufft_forward(plan, x).values, ndft_forward(x, traj).values) <= 1e-5

    def test_oracle_radial(self, radial_plan_16, random_image):
        x = random_image(16, 16)
        exact = ndft_forward(x, radial_plan_16.trajectory)

        assert relative_error(nufft_forward(radial_plan_16, x).values, exact.values) <= 1e-5

    def test_oracle_odd_grid(self, random_image):
        traj = spiral(3, 60)
        x = random_image(15, 11)
        plan = make_plan(traj, 15, 11)

        assert relative_error(nufft_forward(plan, x).values, ndft_forward(x, traj).values) <= 1e-5

    def test_error_decreases_with_width(self, rng, random_image):
        traj = Trajectory(rng.uniform(-0.5, 0.5, size=(300, 2)))
        x = random_image(16, 16)
        exact = ndft_forward(x, traj).values
        errors = [
            relative_error(nufft_forward(make_plan(traj, 16, 16, width_J=j), x).values, exact)
            for j in range(2, 7)
        ]

        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))

    def test_ortho_scaling(self, random_image):
        traj = radial(4, 16)
        x = random_image(8, 8)
        raw = nufft_forward(make_plan(traj, 8, 8), x).values
        ortho = nufft_forward(make_plan(traj, 8, 8, norm="ortho"), x).values

        np.testing.assert_allclose(ortho, raw / 8.0, rtol=1e-13, atol=1e-14)

    def test_shape_mismatch(self, radial_plan_16):
        with pytest.raises(DimensionError):
            nufft_forward(radial_plan_16, ComplexImage.zeros(8, 8))


class TestNufftAdjoint:
    """Tests for nufft_adjoint."""

    def test_zero_samples(self, radial_plan_16):
        img = nufft_adjoint(radial_plan_16, KSpaceSamples.zeros(radial_plan_16.n_samples))

        assert not img.data.any()

    @pytest.mark.parametrize(
        "traj,shape",
        [(radial(16, 32), (16, 16)), (spiral(8, 64), (16, 16)), (cartesian_full(16, 16), (16, 16)),
         (radial(5, 20), (9, 13))],
    )
    @pytest.mark.parametrize("norm_mode", ["backward", "ortho"])
    def test_adjoint_identity(self, traj, shape, norm_mode, random_image, random_samples):
        plan = make_plan(traj, *shape, norm=norm_mode)
        for _ in range(5):
            assert adjoint_mismatch(plan, random_image(*shape), random_samples(len(traj))) <= 1e-10

    def test_psf_peak_at_center(self):
        traj = radial(32, 64)
        delta = np.zeros((16, 16))
        delta[8, 8] = 1.0
        plan = make_plan(traj, 16, 16)
        psf = nufft_adjoint(plan, ndft_forward(ComplexImage(delta), traj))

        assert np.unravel_index(np.argmax(np.abs(psf.data)), psf.shape) == (8, 8)

    def test_close_to_oracle_adjoint(self, radial_plan_16, random_samples):
        y = random_samples(radial_plan_16.n_samples)
        exact = ndft_adjoint(y, radial_plan_16.trajectory, (16, 16))

        assert relative_error(nufft_adjoint(radial_plan_16, y).data, exact.data) <= 1e-5

    def test_length_mismatch(self, radial_plan_16):
        with pytest.raises(DimensionError):
            nufft_adjoint(radial_plan_16, KSpaceSamples.zeros(3))

    def test_workers_deterministic(self, random_samples):
        traj = radial(8, 32)
        y = random_samples(len(traj))
        one = nufft_adjoint(make_plan(traj, 16, 16, workers=1), y)
        two = nufft_adjoint(make_plan(traj, 16, 16, workers=2), y)

        np.testing.assert_array_equal(one.data, two.data)
