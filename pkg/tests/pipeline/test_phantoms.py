"""
Tests for phantom rendering and k-space simulation.
"""

import numpy as np
import pytest

from src.core.exceptions import ParameterError
from src.nufft import nufft_forward
from src.pipeline.phantoms import (
    SHEPP_LOGAN_ELLIPSES,
    ellipse_masks,
    phantom_family,
    pixel_grid,
    shepp_logan,
)
from src.pipeline.simulate import simulate_kspace


class TestSheppLogan:

    @pytest.mark.parametrize("h,w", [(16, 16), (64, 64), (48, 80)])
    def test_range(self, h, w):
        image = shepp_logan(h, w)

        assert image.shape == (h, w)
        assert image.magnitude().max() == 1.0
        assert image.magnitude().min() >= 0.0
        assert not image.data.imag.any()

    def test_background_is_zero(self):
        image = shepp_logan(64, 64)

        assert image.data[0, 0] == 0
        assert image.data[-1, -1] == 0

    def test_too_small(self):
        with pytest.raises(ParameterError):
            shepp_logan(15, 64)

    def test_pixel_centers(self):
        x, y = pixel_grid(4, 2)

        np.testing.assert_allclose(x[0], [-0.5, 0.5])
        np.testing.assert_allclose(y[:, 0], [0.75, 0.25, -0.25, -0.75])

    def test_outer_ellipse_mask(self):
        h, w = 32, 40
        mask = ellipse_masks(h, w)[0]
        outer = SHEPP_LOGAN_ELLIPSES[0]
        for i in range(h):
            for j in range(w):
                x = -1.0 + (2 * j + 1) / w
                y = 1.0 - (2 * i + 1) / h
                inside = (x / outer.semi_x) ** 2 + (y / outer.semi_y) ** 2 <= 1.0
                assert mask[i, j] == inside

    def test_rotated_ellipse_mask(self):
        h = w = 48
        mask = ellipse_masks(h, w)[2]
        e = SHEPP_LOGAN_ELLIPSES[2]
        c, s = np.cos(np.deg2rad(e.angle_deg)), np.sin(np.deg2rad(e.angle_deg))
        for i in range(h):
            for j in range(w):
                x = -1.0 + (2 * j + 1) / w - e.center_x
                y = 1.0 - (2 * i + 1) / h - e.center_y
                u, v = x * c + y * s, y * c - x * s
                assert mask[i, j] == ((u / e.semi_x) ** 2 + (v / e.semi_y) ** 2 <= 1.0)

    def test_orientation(self):
        # ellipse centered at y = +0.35 sits in the upper half of the image
        rows = np.nonzero(ellipse_masks(64, 64)[4].any(axis=1))[0]

        assert rows.max() < 32


class TestPhantomFamily:

    def test_deterministic(self):
        first = phantom_family(3, 32, 32, seed=5)
        second = phantom_family(3, 32, 32, seed=5)

        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.data, b.data)

    def test_seeds_differ(self):
        a = phantom_family(2, 32, 32, seed=1)
        b = phantom_family(2, 32, 32, seed=2)

        assert not np.array_equal(a[0].data, b[0].data)
        assert not np.array_equal(a[0].data, a[1].data)

    def test_prefix_stable(self):
        short = phantom_family(1, 32, 32, seed=9)
        long = phantom_family(4, 32, 32, seed=9)

        np.testing.assert_array_equal(short[0].data, long[0].data)

    def test_variants_normalized(self):
        for image in phantom_family(4, 32, 32, seed=0):
            assert image.magnitude().max() == 1.0
            assert image.magnitude().min() >= 0.0

    def test_empty_and_negative(self):
        assert phantom_family(0, 32, 32, seed=0) == []
        with pytest.raises(ParameterError):
            phantom_family(-1, 32, 32, seed=0)


class TestSimulate:

    def test_noiseless_equals_forward(self, radial_plan_16):
        x = shepp_logan(16, 16)

        np.testing.assert_array_equal(
            simulate_kspace(x, radial_plan_16).values, nufft_forward(radial_plan_16, x).values
        )

    def test_seeded_noise(self, radial_plan_16):
        x = shepp_logan(16, 16)
        a = simulate_kspace(x, radial_plan_16, noise_sigma=0.1, seed=3)
        b = simulate_kspace(x, radial_plan_16, noise_sigma=0.1, seed=3)
        c = simulate_kspace(x, radial_plan_16, noise_sigma=0.1, seed=4)

        np.testing.assert_array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_noise_level(self, radial_plan_16):
        x = shepp_logan(16, 16)
        clean = nufft_forward(radial_plan_16, x).values
        noise = simulate_kspace(x, radial_plan_16, noise_sigma=0.2, seed=0).values - clean

        assert np.std(noise.real) == pytest.approx(0.2, rel=0.15)
        assert np.std(noise.imag) == pytest.approx(0.2, rel=0.15)

    def test_negative_noise(self, radial_plan_16):
        with pytest.raises(ParameterError):
            simulate_kspace(shepp_logan(16, 16), radial_plan_16, noise_sigma=-1.0)
