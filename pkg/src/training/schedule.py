"""
Learning-Rate Schedule
======================

Halve the learning rate after `patience` epochs without a new best
validation loss, and stop once the best loss is `patience` epochs old.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class PlateauScheduler:
    """Stateful plateau rule; the counter resets on improvement and on reduction."""

    lr: float
    patience: int = 10
    factor: float = 0.5
    best: float = float("inf")
    bad_epochs: int = 0

    def step(self, val_loss: float) -> float:
        if val_loss < self.best:
            self.best = val_loss
            self.bad_epochs = 0
            return self.lr
        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            self.lr *= self.factor
            self.bad_epochs = 0
        return self.lr

    def state_dict(self) -> dict[str, float]:
        return {"lr": self.lr, "best": self.best, "bad_epochs": self.bad_epochs}

    def load_state_dict(self, state: dict[str, float]) -> None:
        self.lr = float(state["lr"])
        self.best = float(state["best"])
        self.bad_epochs = int(state["bad_epochs"])


def lr_on_plateau(
    val_history: Sequence[float], initial_lr: float, patience: int = 10, factor: float = 0.5
) -> float:
    """Learning rate after replaying the plateau rule over a validation history."""
    if not val_history:
        raise ValueError("Validation history is empty")
    scheduler = PlateauScheduler(lr=initial_lr, patience=patience, factor=factor)
    for loss in val_history:
        scheduler.step(loss)
    return scheduler.lr


def epochs_since_best(val_history: Sequence[float]) -> int:
    if not val_history:
        return 0
    return len(val_history) - 1 - int(np.argmin(val_history))


def early_stop(val_history: Sequence[float], patience: int = 20) -> bool:
    """True once the best validation loss is at least `patience` epochs old."""
    return epochs_since_best(val_history) >= patience
