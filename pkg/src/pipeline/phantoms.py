"""
Synthetic Shepp-Logan phantoms.

Ellipses are evaluated on pixel centers mapped to [-1, 1]^2, x along
columns (left to right) and y along rows (bottom to top). The additive
image is clipped at 0 and scaled to a maximum of 1.
"""

from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

from src.core.constants import MIN_PHANTOM_SIZE
from src.core.exceptions import ParameterError
from src.core.types import ComplexImage


@dataclass(frozen=True)
class Ellipse:
    intensity: float
    semi_x: float
    semi_y: float
    center_x: float
    center_y: float
    angle_deg: float


# Modified (high contrast) Shepp-Logan
SHEPP_LOGAN_ELLIPSES: Tuple[Ellipse, ...] = (
    Ellipse(1.0, 0.6900, 0.9200, 0.00, 0.0000, 0.0),
    Ellipse(-0.8, 0.6624, 0.8740, 0.00, -0.0184, 0.0),
    Ellipse(-0.2, 0.1100, 0.3100, 0.22, 0.0000, -18.0),
    Ellipse(-0.2, 0.1600, 0.4100, -0.22, 0.0000, 18.0),
    Ellipse(0.1, 0.2100, 0.2500, 0.00, 0.3500, 0.0),
    Ellipse(0.1, 0.0460, 0.0460, 0.00, 0.1000, 0.0),
    Ellipse(0.1, 0.0460, 0.0460, 0.00, -0.1000, 0.0),
    Ellipse(0.1, 0.0460, 0.0230, -0.08, -0.6050, 0.0),
    Ellipse(0.1, 0.0230, 0.0230, 0.00, -0.6060, 0.0),
    Ellipse(0.1, 0.0230, 0.0460, 0.06, -0.6050, 0.0),
)

# Ellipses whose intensity is jittered across the phantom family
INNER_ELLIPSES = (4, 5, 6, 7, 8, 9)


def pixel_grid(h: int, w: int) -> Tuple[np.ndarray, np.ndarray]:
    """(x, y) of every pixel center; row 0 is the top (y close to +1)."""
    x = -1.0 + (2.0 * np.arange(w) + 1.0) / w
    y = 1.0 - (2.0 * np.arange(h) + 1.0) / h
    grid_y, grid_x = np.meshgrid(y, x, indexing="ij")
    return grid_x, grid_y


def inside_ellipse(x: np.ndarray, y: np.ndarray, ellipse: Ellipse) -> np.ndarray:
    theta = np.deg2rad(ellipse.angle_deg)
    dx, dy = x - ellipse.center_x, y - ellipse.center_y
    u = dx * np.cos(theta) + dy * np.sin(theta)
    v = dy * np.cos(theta) - dx * np.sin(theta)
    return (u / ellipse.semi_x) ** 2 + (v / ellipse.semi_y) ** 2 <= 1.0


def _check_size(h: int, w: int) -> None:
    if h < MIN_PHANTOM_SIZE or w < MIN_PHANTOM_SIZE:
        raise ParameterError(f"phantom needs at least {MIN_PHANTOM_SIZE}x{MIN_PHANTOM_SIZE}, received {h}x{w}")


def ellipse_masks(h: int, w: int, ellipses: Sequence[Ellipse] = SHEPP_LOGAN_ELLIPSES) -> np.ndarray:
    """Membership of every pixel center, shape (n_ellipses, h, w)."""
    x, y = pixel_grid(h, w)
    return np.stack([inside_ellipse(x, y, e) for e in ellipses])


def render(masks: np.ndarray, intensities: Sequence[float]) -> ComplexImage:
    image = np.tensordot(np.asarray(intensities, dtype=np.float64), masks.astype(np.float64), axes=1)
    image = np.clip(image, 0.0, None)
    peak = image.max()
    if peak > 0:
        image = image / peak
    return ComplexImage(image.astype(np.complex128))


def shepp_logan(h: int, w: int) -> ComplexImage:
    """
    Ten-ellipse Shepp-Logan phantom with intensities in [0, 1].

    Raises:
        ParameterError: h or w below 16
    """
    _check_size(h, w)
    return render(ellipse_masks(h, w), [e.intensity for e in SHEPP_LOGAN_ELLIPSES])


def _warped_grid(h: int, w: int, angle_deg: float, scale: Tuple[float, float], shift: Tuple[float, float]):
    """Pixel centers pulled back through the inverse of scale -> rotate -> shift."""
    x, y = pixel_grid(h, w)
    x, y = x - shift[0], y - shift[1]
    theta = np.deg2rad(angle_deg)
    xr = x * np.cos(theta) + y * np.sin(theta)
    yr = -x * np.sin(theta) + y * np.cos(theta)
    return xr / scale[0], yr / scale[1]


def phantom_variant(h: int, w: int, rng: np.random.Generator) -> ComplexImage:
    """One affine-warped Shepp-Logan with jittered inner intensities."""
    _check_size(h, w)
    angle = rng.uniform(-10.0, 10.0)
    scale = (rng.uniform(0.85, 1.0), rng.uniform(0.85, 1.0))
    shift = (rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05))
    jitter = rng.uniform(-0.02, 0.02, size=len(INNER_ELLIPSES))

    ellipses: List[Ellipse] = list(SHEPP_LOGAN_ELLIPSES)
    for offset, index in zip(jitter, INNER_ELLIPSES):
        ellipses[index] = replace(ellipses[index], intensity=ellipses[index].intensity + offset)

    x, y = _warped_grid(h, w, angle, scale, shift)
    masks = np.stack([inside_ellipse(x, y, e) for e in ellipses])
    return render(masks, [e.intensity for e in ellipses])


def phantom_family(n: int, h: int, w: int, seed: int) -> List[ComplexImage]:
    """n seeded phantom variants; different seeds give disjoint sets."""
    if n < 0:
        raise ParameterError(f"n must be >= 0, received {n}")
    rng = np.random.default_rng(seed)
    return [phantom_variant(h, w, rng) for _ in range(n)]
