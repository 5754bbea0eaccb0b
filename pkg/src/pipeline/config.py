"""
Experiment configuration.

Defaults live in ``config/recon.yaml``; plain-text ``key = value`` files
override single fields by short alias (``K``, ``lr``) or dotted path
(``model.kind``). Process-level settings come from the environment.
"""

from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

import structlog
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.constants import (
    COMPOUND_LOSS_ALPHA,
    DC_KERNEL_WIDTH,
    DEFAULT_BUFFER_SIZE,
    DEFAULT_DC_ITERATIONS,
    DEFAULT_FILTERS,
    DEFAULT_KERNEL_WIDTH,
    DEFAULT_LEARNING_RATE,
    DEFAULT_OVERSAMPLING,
    DEFAULT_UNROLLED_ITERATIONS,
    LOG_LEVEL_DEFAULT,
    MIN_KERNEL_WIDTH,
    MIN_OVERSAMPLING,
    SPIRAL_DEFAULT_TURNS,
)
from src.core.exceptions import ConfigurationError

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]
PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "recon.yaml"


def parse_grid(value: Any) -> Tuple[int, int]:
    """'64x64', '64', [64, 64] or (64, 64) -> (64, 64)."""
    if isinstance(value, str):
        parts = value.lower().replace(" ", "").split("x")
        try:
            numbers = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"grid must look like HxW, received {value!r}") from None
        value = numbers * 2 if len(numbers) == 1 else numbers
    value = tuple(value)
    if len(value) != 2 or min(value) < 1:
        raise ValueError(f"grid must be two positive integers, received {value}")
    return int(value[0]), int(value[1])


class NufftSettings(BaseModel):
    """Gridding parameters."""
    model_config = ConfigDict(extra="forbid")

    sigma: float = Field(DEFAULT_OVERSAMPLING, ge=MIN_OVERSAMPLING)
    width: int = Field(DEFAULT_KERNEL_WIDTH, ge=MIN_KERNEL_WIDTH)
    norm: Literal["backward", "ortho"] = "ortho"
    workers: int = Field(1, ge=1)


class DcompSettings(BaseModel):
    """Density compensation."""
    model_config = ConfigDict(extra="forbid")

    n_iter: int = Field(DEFAULT_DC_ITERATIONS, ge=0)
    kernel_width: int = Field(DC_KERNEL_WIDTH, ge=MIN_KERNEL_WIDTH)


class ModelSettings(BaseModel):
    """Unrolled model architecture."""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gradient_step", "small_cnn"] = "small_cnn"
    n_iter: int = Field(DEFAULT_UNROLLED_ITERATIONS, ge=1)
    buffer_size: int = Field(DEFAULT_BUFFER_SIZE, ge=1)
    filters: int = Field(DEFAULT_FILTERS, ge=1)
    use_dc: bool = True


class TrainingSettings(BaseModel):
    """Optimizer and schedule."""
    model_config = ConfigDict(extra="forbid")

    lr: float = Field(DEFAULT_LEARNING_RATE, gt=0)
    epochs: int = Field(1, ge=0)
    max_steps: Optional[int] = Field(None, ge=0)
    seed: int = 0
    alpha: float = Field(COMPOUND_LOSS_ALPHA, ge=0, le=1)
    report_compound: bool = False
    show_progress: bool = False


class DataSettings(BaseModel):
    """Synthetic phantom data set."""
    model_config = ConfigDict(extra="forbid")

    grid: Tuple[int, int] = (64, 64)
    trajectory: Literal["radial", "spiral", "cartesian"] = "radial"
    spokes: int = Field(40, ge=1)
    samples: int = Field(128, ge=2)
    turns: float = Field(SPIRAL_DEFAULT_TURNS, gt=0)
    noise: float = Field(0.005, ge=0)
    n_train: int = Field(20, ge=1)
    n_val: int = Field(20, ge=1)
    train_seed: int = 1
    val_seed: int = 2

    @field_validator("grid", mode="before")
    @classmethod
    def _grid(cls, value):
        return parse_grid(value)


class EvalSettings(BaseModel):
    """Evaluation."""
    model_config = ConfigDict(extra="forbid")

    n_jobs: int = 1


class ReconConfig(BaseModel):
    """Complete experiment configuration."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    nufft: NufftSettings = Field(default_factory=NufftSettings)
    dcomp: DcompSettings = Field(default_factory=DcompSettings)
    model: ModelSettings = Field(default_factory=ModelSettings)
    training: TrainingSettings = Field(default_factory=TrainingSettings)
    data: DataSettings = Field(default_factory=DataSettings)
    evaluation: EvalSettings = Field(default_factory=EvalSettings, alias="eval")


class RuntimeSettings(BaseSettings):
    """Process settings from NEXUS_RECON_* environment variables or .env."""
    model_config = SettingsConfigDict(env_prefix="NEXUS_RECON_", env_file=".env", extra="ignore")

    log_level: str = LOG_LEVEL_DEFAULT
    log_json: bool = False
    n_jobs: Optional[int] = None
    config_path: str = str(DEFAULT_CONFIG_PATH)


# Short keys accepted in key = value files
ALIASES: Dict[str, str] = {
    "K": "model.n_iter",
    "B": "model.buffer_size",
    "filters": "model.filters",
    "kind": "model.kind",
    "use_dc": "model.use_dc",
    "lr": "training.lr",
    "epochs": "training.epochs",
    "max_steps": "training.max_steps",
    "seed": "training.seed",
    "alpha": "training.alpha",
    "sigma": "nufft.sigma",
    "J": "nufft.width",
    "norm": "nufft.norm",
    "dc_iters": "dcomp.n_iter",
    "dc_width": "dcomp.kernel_width",
    "grid": "data.grid",
    "trajectory": "data.trajectory",
    "spokes": "data.spokes",
    "samples": "data.samples",
    "turns": "data.turns",
    "noise": "data.noise",
    "n_train": "data.n_train",
    "n_val": "data.n_val",
    "n_jobs": "eval.n_jobs",
}


def _validate(raw: Dict[str, Any], source: str) -> ReconConfig:
    try:
        return ReconConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigurationError(f"{source}: invalid {location}: {first['msg']}") from None


def load_config(path: Optional[PathLike] = None) -> ReconConfig:
    """
    Load the YAML configuration.

    A missing file yields the built-in defaults with a warning.

    Raises:
        ConfigurationError: unreadable YAML or invalid values
    """
    path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if not path.exists():
        logger.warning("config_not_found", path=str(path), fallback="defaults")
        return ReconConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{path}: invalid YAML ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    config = _validate(raw, str(path))
    logger.debug("config_loaded", path=str(path))
    return config


def parse_key_value(text: str, source: str = "<config>") -> Dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment."""
    entries: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{number}: expected 'key = value', found {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigurationError(f"{source}:{number}: empty key")
        entries[key] = value
    return entries


def apply_overrides(config: ReconConfig, overrides: Dict[str, str], source: str = "<overrides>") -> ReconConfig:
    """
    Return a copy of config with overrides applied.

    Raises:
        ConfigurationError: unknown key or invalid value
    """
    raw = config.model_dump(by_alias=True)
    for key, value in overrides.items():
        path = ALIASES.get(key, key)
        section, _, field = path.partition(".")
        if section not in raw or field not in raw[section]:
            known = ", ".join(sorted(ALIASES))
            raise ConfigurationError(f"{source}: unknown key {key!r} (short keys: {known})")
        raw[section][field] = None if value.lower() in ("none", "null", "") else value
    return _validate(raw, source)


def load_training_config(path: PathLike, base: Optional[ReconConfig] = None) -> ReconConfig:
    """Apply a key = value file on top of base (default: the YAML defaults)."""
    path = Path(path)
    base = base if base is not None else load_config()
    overrides = parse_key_value(path.read_text(encoding="utf-8"), str(path))
    return apply_overrides(base, overrides, str(path))
