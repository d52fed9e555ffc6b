"""
Training
========

Adam optimizer, plateau schedule, early stopping, checkpoints and the
training loop.
"""

from .checkpoint import (
    FORMAT_VERSION,
    MAGIC,
    Checkpoint,
    EpochRecord,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from .config import TrainConfig
from .loop import (
    BEST_CHECKPOINT,
    LAST_CHECKPOINT,
    RUN_FILE,
    TRAIN_LOG,
    Trainer,
    TrainResult,
    batch_gradients,
    evaluate_loss,
    example_gradients,
    optimize_batch,
    train,
)
from .optim import OptimState, adam_step, clip_grad_l2, global_norm
from .schedule import PlateauScheduler, early_stop, epochs_since_best, lr_on_plateau

__all__ = [
    "BEST_CHECKPOINT",
    "FORMAT_VERSION",
    "LAST_CHECKPOINT",
    "MAGIC",
    "RUN_FILE",
    "TRAIN_LOG",
    "Checkpoint",
    "EpochRecord",
    "OptimState",
    "PlateauScheduler",
    "TrainConfig",
    "TrainResult",
    "Trainer",
    "adam_step",
    "batch_gradients",
    "clip_grad_l2",
    "early_stop",
    "encode_checkpoint",
    "epochs_since_best",
    "evaluate_loss",
    "example_gradients",
    "global_norm",
    "load_checkpoint",
    "lr_on_plateau",
    "optimize_batch",
    "save_checkpoint",
    "train",
]
