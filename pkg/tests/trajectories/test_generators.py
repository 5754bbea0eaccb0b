"""
Tests for the trajectory generators.
"""

import numpy as np
import pytest

from src.core.exceptions import ParameterError
from src.trajectories import TRAJECTORY_KINDS, acceleration_factor, cartesian_full, generate, radial, spiral


class TestRadial:
    """Tests for radial()."""

    def test_point_count(self):
        assert len(radial(100, 640)) == 64000

    def test_single_spoke_along_kx(self):
        traj = radial(1, 4)

        assert (traj.ky == 0).all()
        np.testing.assert_allclose(traj.kx, [-0.375, -0.125, 0.125, 0.375])

    def test_in_domain(self):
        traj = radial(20, 64)

        assert (np.hypot(traj.kx, traj.ky) < 0.5 * np.sqrt(2)).all()
        assert (traj.points >= -0.5).all() and (traj.points < 0.5).all()

    def test_spokes_symmetric(self):
        n = 64
        traj = radial(7, n)
        points = traj.points.reshape(7, n, 2)

        np.testing.assert_allclose(points, -points[:, ::-1, :], atol=1e-15)

    def test_angles(self):
        traj = radial(4, 8)
        outer = traj.points.reshape(4, 8, 2)[:, -1, :]
        angles = np.arctan2(outer[:, 1], outer[:, 0])

        np.testing.assert_allclose(angles, np.arange(4) * np.pi / 4, atol=1e-12)

    @pytest.mark.parametrize("spokes,samples", [(0, 8), (4, 1)])
    def test_invalid_counts(self, spokes, samples):
        with pytest.raises(ParameterError):
            radial(spokes, samples)


class TestSpiral:
    """Tests for spiral()."""

    def test_point_count(self):
        assert len(spiral(100, 640, 0.5)) == 64000

    def test_starts_at_origin(self):
        traj = spiral(1, 2, 1.0)

        np.testing.assert_array_equal(traj.points[0], [0.0, 0.0])

    def test_radius_nondecreasing(self):
        traj = spiral(4, 128, 0.5)
        radius = np.hypot(traj.kx, traj.ky).reshape(4, 128)

        assert (np.diff(radius, axis=1) >= 0).all()
        assert radius.max() < 0.4999

    def test_arms_rotated(self):
        traj = spiral(4, 16, 0.5)
        second = traj.points.reshape(4, 16, 2)[:, 1, :]
        angles = np.mod(np.arctan2(second[:, 1], second[:, 0]) - np.arctan2(second[0, 1], second[0, 0]), 2 * np.pi)

        np.testing.assert_allclose(angles, np.arange(4) * np.pi / 2, atol=1e-12)

    def test_invalid_turns(self):
        with pytest.raises(ParameterError):
            spiral(2, 8, 0.0)


class TestCartesianFull:
    """Tests for cartesian_full()."""

    def test_two_by_two(self):
        traj = cartesian_full(2, 2)

        np.testing.assert_array_equal(
            traj.points, [[-0.5, -0.5], [-0.5, 0.0], [0.0, -0.5], [0.0, 0.0]]
        )

    @pytest.mark.parametrize("h,w", [(1, 1), (3, 5), (8, 8)])
    def test_point_count(self, h, w):
        assert len(cartesian_full(h, w)) == h * w

    def test_row_major(self):
        traj = cartesian_full(4, 3)

        np.testing.assert_array_equal(traj.kx[:3], [-0.5, -0.5, -0.5])
        np.testing.assert_allclose(traj.ky[:3], [-1 / 3, 0.0, 1 / 3])


class TestAccelerationFactor:

    def test_large_radial_acquisition(self):
        assert acceleration_factor(radial(100, 640), 320, 320) == pytest.approx(1.6)

    def test_full_grid(self):
        assert acceleration_factor(cartesian_full(8, 8), 8, 8) == 1.0

    def test_quarter_sampling(self):
        assert acceleration_factor(radial(4, 4), 8, 8) == 4.0


class TestGenerate:

    @pytest.mark.parametrize("kind", TRAJECTORY_KINDS)
    def test_dispatch(self, kind):
        assert len(generate(kind, 4, 6)) == 24

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            generate("rosette", 4, 6)
