"""8-bit grayscale PNG export of magnitude images."""

from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image

from src.core.constants import PNG_WINDOW_PERCENTILES
from src.core.types import ComplexImage
from src.metrics.calculators.image_quality import error_map

PathLike = Union[str, Path]


def to_u8(magnitude: np.ndarray, window: Tuple[float, float] = PNG_WINDOW_PERCENTILES) -> np.ndarray:
    """
    Window a magnitude image to [p_low, p_high] percentiles and map to 0..255.

    A constant nonzero image maps to mid-gray 128, an all-zero image to 0.
    """
    magnitude = np.abs(np.asarray(magnitude, dtype=np.float64))
    low, high = np.percentile(magnitude, window)
    if high > low:
        scaled = np.clip((magnitude - low) / (high - low), 0.0, 1.0)
        return np.round(scaled * 255.0).astype(np.uint8)
    fill = 128 if high > 0 else 0
    return np.full(magnitude.shape, fill, dtype=np.uint8)


def export_png(img: Union[ComplexImage, np.ndarray], path: PathLike) -> None:
    """Write |img| as an 8-bit grayscale PNG."""
    data = img.data if isinstance(img, ComplexImage) else img
    Image.fromarray(to_u8(np.abs(data))).save(Path(path), format="PNG")


def export_error_png(recon: ComplexImage, ref: ComplexImage, path: PathLike) -> None:
    """Write the absolute error map |recon - ref| as a PNG."""
    export_png(error_map(recon, ref), path)
