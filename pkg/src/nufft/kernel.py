"""
Kaiser-Bessel gridding kernel.

The kernel is tabulated once per plan on [0, J/2] and evaluated by linear
interpolation into the table. Support is the open interval (-J/2, J/2).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import i0

from src.core.constants import KERNEL_TABLE_RESOLUTION, MIN_KERNEL_WIDTH
from src.core.exceptions import ParameterError


def beatty_beta(width: int, sigma: float) -> float:
    """
    Kaiser-Bessel shape parameter for a given width and oversampling.

    beta = pi * sqrt((J / sigma)^2 * (sigma - 1/2)^2 - 0.8)
    """
    return float(np.pi * np.sqrt((width / sigma) ** 2 * (sigma - 0.5) ** 2 - 0.8))


def kaiser_bessel(u: np.ndarray, width: int, beta: float) -> np.ndarray:
    """
    Kaiser-Bessel window normalized to 1 at u = 0.

    Args:
        u: Distances in grid units, |u| <= width / 2
        width: Kernel width J
        beta: Shape parameter

    Returns:
        I0(beta * sqrt(1 - (2u/J)^2)) / I0(beta)
    """
    u = np.asarray(u, dtype=np.float64)
    arg = np.clip(1.0 - (2.0 * u / width) ** 2, 0.0, None)
    return i0(beta * np.sqrt(arg)) / i0(beta)


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """
    Tabulated gridding kernel.

    Attributes:
        width: Taps per axis J
        beta: Kaiser-Bessel shape parameter
        table: Kernel values at u = i / resolution, i = 0 .. resolution * J / 2
        resolution: Table entries per unit distance
    """
    width: int
    beta: float
    table: np.ndarray
    resolution: int = KERNEL_TABLE_RESOLUTION

    def __post_init__(self):
        if self.width < MIN_KERNEL_WIDTH:
            raise ParameterError(f"kernel width must be >= {MIN_KERNEL_WIDTH}, received {self.width}")
        if not self.beta > 0:
            raise ParameterError(f"kernel beta must be > 0, received {self.beta}")
        table = np.array(self.table, dtype=np.float64)
        if table.ndim != 1 or table.size < 2 or not (table > 0).all():
            raise ParameterError("kernel table must hold at least two positive values")
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        """Kernel value at signed distances u; zero outside the open support."""
        distance = np.abs(np.asarray(u, dtype=np.float64))
        inside = distance < self.half_width
        position = np.where(inside, distance, 0.0) * self.resolution
        index = np.minimum(np.floor(position).astype(np.int64), self.table.size - 2)
        frac = position - index
        value = self.table[index] * (1.0 - frac) + self.table[index + 1] * frac
        return np.where(inside, value, 0.0)

    def footprint(self, s: np.ndarray) -> np.ndarray:
        """Continuous Fourier transform of the kernel at s cycles per oversampled grid node."""
        return kaiser_bessel_transform(s, self.width, self.beta)


def kaiser_bessel_transform(s: np.ndarray, width: int, beta: float) -> np.ndarray:
    """
    Fourier transform of ``kaiser_bessel``.

    J * sinh(z) / z / I0(beta) with z = sqrt(beta^2 - (pi J s)^2); past the
    cutoff z is imaginary and sinh(z) / z becomes sin(|z|) / |z|.
    """
    s = np.asarray(s, dtype=np.float64)
    z_squared = beta**2 - (np.pi * width * s) ** 2
    z = np.sqrt(np.abs(z_squared))
    safe = np.where(z > 0, z, 1.0)
    ratio = np.where(z_squared > 0, np.sinh(safe) / safe, np.sinc(z / np.pi))
    ratio = np.where(z > 0, ratio, 1.0)
    return width * ratio / i0(beta)


def make_kernel(width: int, sigma: float, resolution: int = KERNEL_TABLE_RESOLUTION) -> KernelSpec:
    """Build the Kaiser-Bessel table for width J and oversampling sigma."""
    if int(width) != width:
        raise ParameterError(f"kernel width must be an integer, received {width}")
    width = int(width)
    if width < MIN_KERNEL_WIDTH:
        raise ParameterError(f"kernel width must be >= {MIN_KERNEL_WIDTH}, received {width}")
    beta = beatty_beta(width, sigma)
    n_entries = int(np.ceil(resolution * width / 2.0)) + 1
    u = np.arange(n_entries, dtype=np.float64) / resolution
    table = kaiser_bessel(np.minimum(u, width / 2.0), width, beta)
    return KernelSpec(width=width, beta=beta, table=table, resolution=resolution)
