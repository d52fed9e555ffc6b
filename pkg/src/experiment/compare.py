"""
Fusion Comparison
=================

Trains TI and TV variants of one configuration for several seeds and
scores both on the same fixed test scenes.
"""

import json
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import BaseModel, Field

from ..networks.config import FusionMode
from ..observability import get_logger
from ..scenes import dataset_iter
from ..training import train
from .config import ExperimentConfig, config_hash
from .estimators import ModelEstimator
from .evaluate import evaluate_scenes

logger = get_logger(__name__)

FUSION_MODES: tuple[FusionMode, ...] = ("TI", "TV")


class SeedResult(BaseModel):
    seed: int
    ti_si_sdri: float
    tv_si_sdri: float

    @property
    def gap(self) -> float:
        return self.tv_si_sdri - self.ti_si_sdri


class FusionComparison(BaseModel):
    """Per-seed test SI-SDRi of both fusion modes."""

    config_hash: str
    test_count: int
    seeds: list[SeedResult] = Field(default_factory=list)

    @property
    def median_gap(self) -> float:
        return float(np.median([s.gap for s in self.seeds])) if self.seeds else float("nan")

    @property
    def tv_wins(self) -> int:
        return sum(1 for s in self.seeds if s.gap > 0)

    def to_json(self, path: Union[str, Path]) -> Path:
        payload = self.model_dump()
        payload["median_gap"] = self.median_gap
        payload["tv_wins"] = self.tv_wins
        for row, seed in zip(payload["seeds"], self.seeds):
            row["gap"] = seed.gap
        path = Path(path)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        return path


def variant(config: ExperimentConfig, fusion: FusionMode, seed: int) -> ExperimentConfig:
    return config.model_copy(
        update={
            "model": config.model.model_copy(update={"fusion": fusion}),
            "train": config.train.model_copy(update={"seed": seed}),
        }
    )


def compare_fusion(
    config: ExperimentConfig, seeds: int, out_dir: Union[str, Path], test_count: int = 100
) -> FusionComparison:
    """Train both fusion modes for seeds 0..seeds-1; write comparison.json."""
    out_dir = Path(out_dir)
    settings = config.data.scene_settings()
    train_bank, val_bank = config.data.source_bank("train"), config.data.source_bank("validation")
    test_scenes = list(dataset_iter("test", 0, test_count, config.data.source_bank("test"), settings))

    result = FusionComparison(config_hash=config_hash(config), test_count=test_count)
    for seed in range(seeds):
        scores: dict[str, float] = {}
        for fusion in FUSION_MODES:
            run_config = variant(config, fusion, seed)
            run = train(
                run_config.model,
                run_config.train,
                train_bank,
                val_bank,
                settings,
                out_dir=out_dir / f"{fusion}-seed{seed}",
                run_info={"config_hash": config_hash(run_config), "seed": seed, "fusion": fusion},
                scene_workers=config.data.workers,
            )
            report = evaluate_scenes(ModelEstimator(run.best.to_model()), test_scenes)
            scores[fusion] = float(report.mean_si_sdri or 0.0)
        result.seeds.append(SeedResult(seed=seed, ti_si_sdri=scores["TI"], tv_si_sdri=scores["TV"]))
        logger.info("Fusion comparison seed done", seed=seed, ti=scores["TI"], tv=scores["TV"])

    result.to_json(out_dir / "comparison.json")
    return result
