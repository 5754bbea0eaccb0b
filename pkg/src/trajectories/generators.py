"""
K-space trajectory generators.

All generators return validated Trajectory values, so every coordinate
lies in [-0.5, 0.5). kx runs along image rows (axis 0), ky along columns.
"""

import numpy as np

from src.core.constants import SPIRAL_MAX_RADIUS, SPIRAL_DEFAULT_TURNS
from src.core.exceptions import ParameterError
from src.core.types import Trajectory


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def radial(n_spokes: int, n_per_spoke: int) -> Trajectory:
    """
    Evenly spaced diameters through the k-space center.

    Spoke s sits at angle s*pi/n_spokes. Radii are the cell centers of a
    uniform partition of [-0.5, 0.5), so each spoke is symmetric about 0.

    Args:
        n_spokes: Number of spokes, >= 1
        n_per_spoke: Samples per spoke, >= 2

    Returns:
        Trajectory with n_spokes * n_per_spoke points, spoke-major
    """
    _require(n_spokes >= 1, f"n_spokes must be >= 1, received {n_spokes}")
    _require(n_per_spoke >= 2, f"n_per_spoke must be >= 2, received {n_per_spoke}")
    angles = np.arange(n_spokes) * np.pi / n_spokes
    radii = -0.5 + (np.arange(n_per_spoke) + 0.5) / n_per_spoke
    kx = np.outer(np.cos(angles), radii)
    ky = np.outer(np.sin(angles), radii)
    return Trajectory(np.stack([kx.ravel(), ky.ravel()], axis=1))


def spiral(n_arms: int, n_per_arm: int, turns: float = SPIRAL_DEFAULT_TURNS) -> Trajectory:
    """
    Interleaved Archimedean spiral.

    Arm a: k(t) = 0.4999 * t * (cos, sin)(2*pi*turns*t + 2*pi*a/n_arms),
    t = i / n_per_arm for i in [0, n_per_arm).
    """
    _require(n_arms >= 1, f"n_arms must be >= 1, received {n_arms}")
    _require(n_per_arm >= 2, f"n_per_arm must be >= 2, received {n_per_arm}")
    _require(turns > 0, f"turns must be > 0, received {turns}")
    t = np.arange(n_per_arm) / n_per_arm
    phase = 2.0 * np.pi * turns * t[None, :] + 2.0 * np.pi * np.arange(n_arms)[:, None] / n_arms
    radius = SPIRAL_MAX_RADIUS * t[None, :]
    kx = radius * np.cos(phase)
    ky = radius * np.sin(phase)
    return Trajectory(np.stack([kx.ravel(), ky.ravel()], axis=1))


def cartesian_full(h: int, w: int) -> Trajectory:
    """Every DFT node of an h x w grid, row-major: kx = (p - h//2)/h, ky = (q - w//2)/w."""
    _require(h >= 1 and w >= 1, f"grid dimensions must be positive, received {h}x{w}")
    kx = (np.arange(h) - h // 2) / h
    ky = (np.arange(w) - w // 2) / w
    grid_x, grid_y = np.meshgrid(kx, ky, indexing="ij")
    return Trajectory(np.stack([grid_x.ravel(), grid_y.ravel()], axis=1))


def acceleration_factor(traj: Trajectory, h: int, w: int) -> float:
    """Full-grid sample count over acquired sample count, (h*w)/M."""
    return (h * w) / len(traj)


TRAJECTORY_KINDS = ("radial", "spiral", "cartesian")


def generate(kind: str, count_a: int, count_b: int, turns: float = SPIRAL_DEFAULT_TURNS) -> Trajectory:
    """
    Dispatch by kind name.

    radial: (spokes, samples per spoke); spiral: (arms, samples per arm);
    cartesian: (h, w).
    """
    if kind == "radial":
        return radial(count_a, count_b)
    if kind == "spiral":
        return spiral(count_a, count_b, turns)
    if kind == "cartesian":
        return cartesian_full(count_a, count_b)
    raise ParameterError(f"unknown trajectory kind {kind!r}; expected one of {TRAJECTORY_KINDS}")
