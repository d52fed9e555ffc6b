"""
Echo Estimators
===============

Anything that maps a scene to an echo estimate: a trained model, or the
oracle (true echo) and zero stubs that give the evaluation pipeline a
known answer without a model.
"""

from pathlib import Path
from typing import Literal, Optional, Protocol, Union

import numpy as np

from ..networks import ExtractionModel
from ..scenes import AerScene
from ..training import load_checkpoint

StubKind = Literal["oracle", "zero"]


class EchoEstimator(Protocol):
    name: str

    def estimate_echo(self, scene: AerScene) -> np.ndarray: ...


class ModelEstimator:
    """Echo estimate from an extraction model."""

    name = "model"

    def __init__(self, model: ExtractionModel) -> None:
        self.model = model

    @classmethod
    def from_checkpoint(cls, path: Union[str, Path]) -> "ModelEstimator":
        return cls(load_checkpoint(path).to_model())

    def estimate_echo(self, scene: AerScene) -> np.ndarray:
        return self.model.estimate_echo(scene.mixture, scene.reference)


class OracleEstimator:
    """Returns the true echo."""

    name = "oracle"

    def estimate_echo(self, scene: AerScene) -> np.ndarray:
        return scene.echo.copy()


class ZeroEstimator:
    """Returns silence, so the near-end estimate is the mixture itself."""

    name = "zero"

    def estimate_echo(self, scene: AerScene) -> np.ndarray:
        return np.zeros_like(scene.mixture)


def make_estimator(
    checkpoint: Optional[Union[str, Path]] = None, stub: Optional[StubKind] = None
) -> EchoEstimator:
    if (checkpoint is None) == (stub is None):
        raise ValueError("Give exactly one of checkpoint or stub")
    if stub == "oracle":
        return OracleEstimator()
    if stub == "zero":
        return ZeroEstimator()
    if stub is not None:
        raise ValueError(f"Unknown stub {stub!r}")
    return ModelEstimator.from_checkpoint(checkpoint)  # type: ignore[arg-type]
