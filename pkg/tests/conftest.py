"""
Pytest configuration and shared fixtures.

Puts the repository root on sys.path (backup to pytest.ini) and provides
seeded random data, small NUFFT plans and a phantom.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Search upwards for the directory holding "src"
THIS_FILE = Path(__file__).resolve()
for parent in [THIS_FILE.parent, *THIS_FILE.parents]:
    if (parent / "src").is_dir():
        sys.path.insert(0, str(parent))
        break
else:
    raise RuntimeError("could not find the 'src' directory to add to sys.path")

from src.core.types import ComplexImage, KSpaceSamples  # noqa: E402
from src.nufft.plan import make_plan  # noqa: E402
from src.trajectories.generators import cartesian_full, radial  # noqa: E402


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    def _make(h: int, w: int) -> ComplexImage:
        return ComplexImage(random_complex(rng, (h, w)))
    return _make


@pytest.fixture
def random_samples(rng):
    def _make(m: int) -> KSpaceSamples:
        return KSpaceSamples(random_complex(rng, m))
    return _make


@pytest.fixture(scope="session")
def radial_plan_16():
    """radial(8, 32) on a 16x16 grid, raw sums."""
    return make_plan(radial(8, 32), 16, 16)


@pytest.fixture(scope="session")
def cartesian_plan_8():
    """Full Cartesian 8x8 grid, orthonormal scaling."""
    return make_plan(cartesian_full(8, 8), 8, 8, norm="ortho")


@pytest.fixture(scope="session")
def small_radial_plan():
    """radial(6, 16) on 8x8, orthonormal scaling."""
    return make_plan(radial(6, 16), 8, 8, norm="ortho")
