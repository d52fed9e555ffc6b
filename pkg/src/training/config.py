"""
Training Configuration
======================

Optimizer, schedule and data-volume settings of a training run. Defaults
are the full-scale values: Adam at 1e-3 with 1e-5 weight decay, gradient
clipping at an l2 norm of 5, batch 24, 10,000 training and 4,000
validation examples per epoch.
"""

from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """Hyperparameters of the training loop."""

    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(default=1e-3, gt=0)
    weight_decay: float = Field(default=1e-5, ge=0, description="L2 coupled into the gradient")
    clip_norm: float = Field(default=5.0, gt=0, description="Global gradient l2 norm limit")
    batch_size: int = Field(default=24, gt=0)
    max_epochs: int = Field(default=300, gt=0)
    train_per_epoch: int = Field(default=10000, gt=0)
    val_per_epoch: int = Field(default=4000, gt=0)
    plateau_patience: int = Field(default=10, gt=0, description="Epochs without improvement before lr is reduced")
    plateau_factor: float = Field(default=0.5, gt=0, lt=1)
    early_stop_patience: int = Field(default=20, gt=0)
    seed: int = 0
    workers: int = Field(default=1, ge=1, description="Threads computing per-example gradients")
