"""
Experiment pipeline: synthetic data, file formats, configuration,
command-line entry point, self-test and ablation.
"""

from .config import ReconConfig, RuntimeSettings, load_config, load_training_config
from .phantoms import phantom_family, shepp_logan
from .simulate import simulate_kspace

__all__ = [
    "ReconConfig",
    "RuntimeSettings",
    "load_config",
    "load_training_config",
    "phantom_family",
    "shepp_logan",
    "simulate_kspace",
]
