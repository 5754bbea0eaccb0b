"""Radial, spiral and full-Cartesian k-space trajectories."""

from .generators import (
    TRAJECTORY_KINDS,
    acceleration_factor,
    cartesian_full,
    generate,
    radial,
    spiral,
)

__all__ = [
    "TRAJECTORY_KINDS",
    "acceleration_factor",
    "cartesian_full",
    "generate",
    "radial",
    "spiral",
]
