"""
Training Loop
=============

Epochs of freshly sampled training scenes, a fixed validation stream,
per-example gradients reduced in example order, clipping, Adam, plateau
learning-rate halving, early stopping and checkpointing.

Artifacts in `out_dir`: last.isec (every epoch), best.isec (on validation
improvement), train_log.csv and run.json.
"""

import csv
import json
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional, Sequence

import numpy as np

from ..autodiff import Tape
from ..errors import TrainingDivergedError
from ..metrics import sdr_loss
from ..networks import ExtractionModel, ModelConfig
from ..observability import get_instrumentation, get_logger, get_metrics
from ..scenes import AerScene, SceneSettings, SourceBank, dataset_iter
from .checkpoint import Checkpoint, EpochRecord, load_checkpoint, save_checkpoint
from .config import TrainConfig
from .optim import Grads, OptimState, adam_step, clip_grad_l2, global_norm, grad_norms
from .schedule import PlateauScheduler, early_stop

logger = get_logger(__name__)

LAST_CHECKPOINT = "last.isec"
BEST_CHECKPOINT = "best.isec"
TRAIN_LOG = "train_log.csv"
RUN_FILE = "run.json"
LOG_COLUMNS = ("epoch", "train_loss", "val_loss", "lr", "seconds")


# ============================================================
# GRADIENTS
# ============================================================


def example_gradients(model: ExtractionModel, scene: AerScene) -> tuple[float, Grads]:
    """Negative SDR of one scene and its parameter gradients, on a private tape."""
    with Tape() as tape:
        output = model.forward(scene.mixture, scene.reference)
        loss = sdr_loss(scene.echo, output.estimate)
        grads = tape.backward(loss, accumulate=False)
    return loss.item(), {name: grads[t] for name, t in model.params.items()}


def batch_gradients(
    model: ExtractionModel, scenes: Sequence[AerScene], executor: Optional[Executor] = None
) -> tuple[float, Grads]:
    """Mean loss and mean gradients, summed in example order."""
    if executor is None:
        results = [example_gradients(model, s) for s in scenes]
    else:
        results = list(executor.map(lambda s: example_gradients(model, s), scenes))
    total = {name: np.zeros_like(t.data) for name, t in model.params.items()}
    for _, grads in results:
        for name in total:
            total[name] += grads[name]
    n = len(results)
    mean_loss = sum(loss for loss, _ in results) / n
    return mean_loss, {name: (g / n).astype(g.dtype) for name, g in total.items()}


def evaluate_loss(model: ExtractionModel, scenes: Iterable[AerScene]) -> float:
    """Mean negative SDR without recording gradients."""
    losses = [
        sdr_loss(scene.echo, model.forward(scene.mixture, scene.reference).estimate).item()
        for scene in scenes
    ]
    return float(np.mean(losses))


def update_step(
    model: ExtractionModel,
    optim: OptimState,
    scenes: Sequence[AerScene],
    config: TrainConfig,
    executor: Optional[Executor] = None,
    position: tuple[int, int] = (0, 0),
) -> float:
    """One clipped Adam step on a batch; raises on a non-finite loss or gradient."""
    loss, grads = batch_gradients(model, scenes, executor)
    if not np.isfinite(loss) or not np.isfinite(global_norm(grads)):
        norms = grad_norms(grads)
        get_instrumentation().on_divergence(position[0], position[1], norms)
        raise TrainingDivergedError(position[0], position[1], norms)
    adam_step(model.params, clip_grad_l2(grads, config.clip_norm), optim, config.weight_decay)
    return loss


def optimize_batch(
    model: ExtractionModel, scenes: Sequence[AerScene], steps: int, config: TrainConfig
) -> list[float]:
    """Repeated steps on one fixed batch; returns the loss before each step."""
    optim = OptimState.for_params(model.params, config.learning_rate)
    return [update_step(model, optim, scenes, config, position=(0, i)) for i in range(steps)]


def _batches(stream: Iterable[AerScene], size: int) -> Iterator[list[AerScene]]:
    batch: list[AerScene] = []
    for scene in stream:
        batch.append(scene)
        if len(batch) == size:
            yield batch
            batch = []
    if batch:
        yield batch


def epoch_seed(seed: int, epoch: int) -> int:
    return seed * 100_000 + epoch


# ============================================================
# TRAINER
# ============================================================


@dataclass
class TrainResult:
    """Outcome of a training run."""

    best: Checkpoint
    last: Checkpoint
    history: list[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False


class Trainer:
    """Owns the model, optimizer, scheduler and history of one run."""

    def __init__(
        self,
        model_config: ModelConfig,
        train_config: TrainConfig,
        train_bank: SourceBank,
        val_bank: Optional[SourceBank] = None,
        settings: Optional[SceneSettings] = None,
        out_dir: Optional[Path] = None,
        run_info: Optional[dict[str, Any]] = None,
        scene_workers: int = 1,
    ) -> None:
        self.config = train_config
        self.scene_workers = scene_workers
        self.train_bank = train_bank
        self.val_bank = val_bank or train_bank
        self.settings = settings or SceneSettings(sample_rate=model_config.sample_rate)
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.run_info = dict(run_info or {})
        self.model = ExtractionModel(model_config, seed=train_config.seed)
        self.optim = OptimState.for_params(self.model.params, train_config.learning_rate)
        self.scheduler = PlateauScheduler(
            lr=train_config.learning_rate,
            patience=train_config.plateau_patience,
            factor=train_config.plateau_factor,
        )
        self.history: list[EpochRecord] = []
        self.best: Optional[Checkpoint] = None
        self._val_scenes: Optional[list[AerScene]] = None

    # ---- state ---------------------------------------------------

    def checkpoint(self) -> Checkpoint:
        optim = OptimState(
            lr=self.optim.lr,
            step=self.optim.step,
            m={k: v.copy() for k, v in self.optim.m.items()},
            v={k: v.copy() for k, v in self.optim.v.items()},
        )
        return Checkpoint.from_model(
            self.model,
            optim=optim,
            history=list(self.history),
            scheduler=self.scheduler.state_dict(),
            meta={k: self.run_info[k] for k in ("config_hash", "seed") if k in self.run_info},
        )

    def restore(self, ckpt: Checkpoint) -> None:
        self.model.params.load_arrays(ckpt.params)
        if ckpt.optim is not None:
            self.optim = ckpt.optim
        self.scheduler.load_state_dict(ckpt.scheduler)
        self.history = list(ckpt.history)
        logger.info("Resumed training", epoch=ckpt.epoch, lr=self.optim.lr)

    def validation_scenes(self) -> list[AerScene]:
        if self._val_scenes is None:
            self._val_scenes = list(
                dataset_iter(
                    "validation",
                    0,
                    self.config.val_per_epoch,
                    self.val_bank,
                    self.settings,
                    workers=self.scene_workers,
                )
            )
        return self._val_scenes

    # ---- epochs --------------------------------------------------

    def run_epoch(self, epoch: int, executor: Optional[Executor] = None) -> EpochRecord:
        start = time.perf_counter()
        lr = self.optim.lr
        stream = dataset_iter(
            "train",
            epoch_seed(self.config.seed, epoch),
            self.config.train_per_epoch,
            self.train_bank,
            self.settings,
            workers=self.scene_workers,
        )
        losses = [
            update_step(self.model, self.optim, batch, self.config, executor, (epoch, i))
            for i, batch in enumerate(_batches(stream, self.config.batch_size))
        ]
        val_loss = evaluate_loss(self.model, self.validation_scenes())
        new_lr = self.scheduler.step(val_loss)
        if new_lr != lr:
            get_instrumentation().on_lr_change(epoch, lr, new_lr)
            self.optim.lr = new_lr
        return EpochRecord(
            epoch=epoch,
            train_loss=float(np.mean(losses)),
            val_loss=val_loss,
            lr=lr,
            seconds=time.perf_counter() - start,
        )

    def _after_epoch(self, record: EpochRecord) -> None:
        self.history.append(record)
        get_instrumentation().on_epoch_end(
            record.epoch, record.train_loss, record.val_loss, record.lr, record.seconds
        )
        val_history = [r.val_loss for r in self.history]
        improved = int(np.argmin(val_history)) == len(val_history) - 1
        snapshot = self.checkpoint()
        if improved:
            self.best = snapshot
        if self.out_dir is None:
            return
        save_checkpoint(self.out_dir / LAST_CHECKPOINT, snapshot)
        get_instrumentation().on_checkpoint(str(self.out_dir / LAST_CHECKPOINT), record.epoch, False)
        if improved:
            save_checkpoint(self.out_dir / BEST_CHECKPOINT, snapshot)
            get_instrumentation().on_checkpoint(str(self.out_dir / BEST_CHECKPOINT), record.epoch, True)
        write_train_log(self.out_dir / TRAIN_LOG, self.history)

    def fit(self) -> TrainResult:
        first_epoch = self.history[-1].epoch + 1 if self.history else 1
        get_instrumentation().on_run_start(
            self.run_info.get("config_hash", ""), self.model.params.total(), first_epoch=first_epoch
        )
        self._write_run_file(stopped_early=False)
        executor = ThreadPoolExecutor(self.config.workers) if self.config.workers > 1 else None
        stopped = False
        try:
            for epoch in range(first_epoch, self.config.max_epochs + 1):
                with get_metrics().timer("training.epoch"):
                    self._after_epoch(self.run_epoch(epoch, executor))
                val_history = [r.val_loss for r in self.history]
                if early_stop(val_history, self.config.early_stop_patience):
                    get_instrumentation().on_early_stop(epoch, self.best_epoch)
                    stopped = True
                    break
        finally:
            if executor is not None:
                executor.shutdown()
        self._write_run_file(stopped_early=stopped)
        last = self.checkpoint()
        return TrainResult(
            best=self.best or last,
            last=last,
            history=list(self.history),
            best_epoch=self.best_epoch,
            stopped_early=stopped,
        )

    @property
    def best_epoch(self) -> int:
        if not self.history:
            return 0
        return self.history[int(np.argmin([r.val_loss for r in self.history]))].epoch

    def _write_run_file(self, stopped_early: bool) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            **self.run_info,
            "param_count": self.model.params.total(),
            "epochs_completed": len(self.history),
            "best_epoch": self.best_epoch,
            "stopped_early": stopped_early,
        }
        (self.out_dir / RUN_FILE).write_text(json.dumps(payload, indent=2, sort_keys=True))


def write_train_log(path: Path, history: Sequence[EpochRecord]) -> None:
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(LOG_COLUMNS)
        for r in history:
            writer.writerow([r.epoch, f"{r.train_loss:.6f}", f"{r.val_loss:.6f}", f"{r.lr:.6g}", f"{r.seconds:.3f}"])


def train(
    model_config: ModelConfig,
    train_config: TrainConfig,
    train_bank: SourceBank,
    val_bank: Optional[SourceBank] = None,
    settings: Optional[SceneSettings] = None,
    out_dir: Optional[Path] = None,
    resume: bool = False,
    run_info: Optional[dict[str, Any]] = None,
    scene_workers: int = 1,
) -> TrainResult:
    """
    Train an extraction model; with `resume`, continue from out_dir/last.isec.

    Deterministic for a given seed when train_config.workers == 1.
    """
    trainer = Trainer(
        model_config, train_config, train_bank, val_bank, settings, out_dir, run_info, scene_workers
    )
    if resume:
        if out_dir is None or not (Path(out_dir) / LAST_CHECKPOINT).exists():
            raise FileNotFoundError(f"Nothing to resume in {out_dir}")
        trainer.restore(load_checkpoint(Path(out_dir) / LAST_CHECKPOINT))
        if (Path(out_dir) / BEST_CHECKPOINT).exists():
            trainer.best = load_checkpoint(Path(out_dir) / BEST_CHECKPOINT)
    return trainer.fit()
