"""
Experiment Configuration
========================

YAML experiment documents with `model`, `train`, `data` and `paths`
sections. Parsing is strict: unknown keys are rejected by name, missing
keys take the full-scale defaults. `emit_config` writes the canonical form
and `config_hash` fingerprints it.
"""

import hashlib
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..acoustics import Split
from ..errors import ConfigError, UnknownConfigKeyError
from ..networks import ModelConfig, desk_model_config
from ..observability import get_logger
from ..scenes import SceneSettings, SourceBank
from ..training import TrainConfig

logger = get_logger(__name__)

Preset = Literal["full", "desk"]
PRESETS: tuple[Preset, ...] = ("full", "desk")


class DataConfig(BaseModel):
    """Scene and source-material settings."""

    model_config = ConfigDict(extra="forbid")

    sample_rate: int = Field(default=16000, gt=0)
    scene_seconds: float = Field(default=4.0, gt=0)
    sir_min_db: float = -5.0
    sir_max_db: float = 5.0
    source_dir: Optional[str] = Field(default=None, description="`<label>/*.wav` tree; synthetic when unset")
    source_seconds: float = Field(default=6.0, gt=0, description="Length of each synthetic source")
    sources_per_class: int = Field(default=8, gt=0)
    validation_seed: int = 1234
    test_seed: int = 4321
    geometry_bank_size: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1, description="Threads generating scenes")

    def scene_settings(self) -> SceneSettings:
        return SceneSettings(
            sample_rate=self.sample_rate,
            scene_seconds=self.scene_seconds,
            sir_min_db=self.sir_min_db,
            sir_max_db=self.sir_max_db,
            validation_seed=self.validation_seed,
            test_seed=self.test_seed,
            geometry_bank_size=self.geometry_bank_size,
        )

    def source_bank(self, split: Split) -> SourceBank:
        if self.source_dir:
            return SourceBank.from_directory(self.source_dir, split, self.sample_rate)
        return SourceBank.synthetic(
            split, self.sample_rate, seconds=self.source_seconds, per_class=self.sources_per_class
        )


class PathsConfig(BaseModel):
    """Output locations."""

    model_config = ConfigDict(extra="forbid")

    out_dir: str = "runs/default"


class ExperimentConfig(BaseModel):
    """One complete experiment."""

    model_config = ConfigDict(extra="forbid")

    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)

    @model_validator(mode="after")
    def _check_rates(self) -> "ExperimentConfig":
        if self.model.sample_rate != self.data.sample_rate:
            raise ValueError(
                f"model.sample_rate {self.model.sample_rate} != data.sample_rate {self.data.sample_rate}"
            )
        return self


# ============================================================
# PRESETS
# ============================================================


def full_preset() -> ExperimentConfig:
    """Full-scale DPRNN-TV experiment (16 kHz, 4 s scenes)."""
    return ExperimentConfig()


def desk_preset() -> ExperimentConfig:
    """8 kHz, 1 s scenes, N=64, one block per stack, 200 training examples per epoch."""
    return ExperimentConfig(
        model=desk_model_config(),
        train=TrainConfig(batch_size=8, max_epochs=30, train_per_epoch=200, val_per_epoch=50),
        data=DataConfig(
            sample_rate=8000,
            scene_seconds=1.0,
            source_seconds=3.0,
            geometry_bank_size=32,
        ),
        paths=PathsConfig(out_dir="runs/desk"),
    )


def preset(name: Preset) -> ExperimentConfig:
    if name == "full":
        return full_preset()
    if name == "desk":
        return desk_preset()
    raise ConfigError(f"Unknown preset {name!r}; choose from {', '.join(PRESETS)}")


# ============================================================
# PARSING
# ============================================================


def _raise_for(error: ValidationError) -> None:
    for item in error.errors():
        if item["type"] == "extra_forbidden":
            raise UnknownConfigKeyError(".".join(str(p) for p in item["loc"])) from error
    raise ConfigError(f"Invalid config: {error}") from error


def parse_config_text(text: str) -> ExperimentConfig:
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"Config is not valid YAML: {e}") from e
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError(f"Config must be a mapping, got {type(document).__name__}")
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as e:
        _raise_for(e)
        raise


def parse_config(path: Union[str, Path]) -> ExperimentConfig:
    """Strictly parse a YAML config file; an empty file is the full-scale config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    config = parse_config_text(path.read_text())
    logger.debug("Parsed config", path=str(path), config_hash=config_hash(config))
    return config


def emit_config(config: ExperimentConfig) -> str:
    """Canonical YAML: sorted keys, block style."""
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=True, default_flow_style=False)


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(emit_config(config).encode("utf-8")).hexdigest()[:12]


def load_experiment(path: Optional[Union[str, Path]] = None, fallback: Preset = "desk") -> ExperimentConfig:
    """Config from `path`, or the fallback preset when no path is given."""
    return parse_config(path) if path is not None else preset(fallback)
