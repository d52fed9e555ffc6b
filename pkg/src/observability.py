"""
Echo Extract Observability
==========================

Structured logging and metrics for simulation, training and evaluation.

Log calls take keyword fields (`logger.info("Epoch finished", epoch=3)`).
Fields may be numpy scalars or arrays; they are converted before being
rendered, either as JSON lines or as `key=value` pairs after the
plain-text message.
"""

import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Generator, Optional

import numpy as np

LEVEL_ENV = "ECHO_EXTRACT_LOG_LEVEL"
JSON_ENV = "ECHO_EXTRACT_LOG_JSON"
PLAIN_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"

# Arrays with more entries than this are logged as a shape summary.
MAX_LOGGED_ENTRIES = 16


# ============================================================
# FIELD CONVERSION
# ============================================================


def loggable(value: Any) -> Any:
    """Turn numpy values into plain JSON-compatible Python values."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        if value.size > MAX_LOGGED_ENTRIES:
            return {"shape": list(value.shape), "dtype": value.dtype.name}
        return value.tolist()
    if isinstance(value, dict):
        return {str(k): loggable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [loggable(v) for v in value]
    return value


def _fields(record: logging.LogRecord) -> dict[str, Any]:
    return getattr(record, "extra_data", {})


# ============================================================
# FORMATTERS
# ============================================================


class StructuredFormatter(logging.Formatter):
    """One JSON object per line; warnings and errors carry their source location."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            **_fields(record),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        if record.levelno >= logging.WARNING:
            payload["location"] = {
                "file": record.filename,
                "line": record.lineno,
                "function": record.funcName,
            }
        return json.dumps(payload, default=str)


class FieldsFormatter(logging.Formatter):
    """Plain text with the structured fields appended as key=value."""

    def __init__(self) -> None:
        super().__init__(PLAIN_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        fields = _fields(record)
        if not fields:
            return line
        pairs = " ".join(f"{k}={json.dumps(v, default=str)}" for k, v in fields.items())
        return f"{line} | {pairs}"


# ============================================================
# LOGGER
# ============================================================


class StructuredLogger:
    """Thin wrapper over `logging.Logger` that carries keyword fields."""

    def __init__(self, name: str, context: Optional[dict[str, Any]] = None) -> None:
        self.logger = logging.getLogger(name)
        self._context: dict[str, Any] = dict(context or {})

    def with_context(self, **fields: Any) -> "StructuredLogger":
        """Child logger whose records always include `fields`."""
        return StructuredLogger(self.logger.name, {**self._context, **fields})

    def _emit(self, level: int, message: str, fields: dict[str, Any], exc_info: bool = False) -> None:
        if not self.logger.isEnabledFor(level):
            return
        data = {k: loggable(v) for k, v in {**self._context, **fields}.items()}
        # stacklevel 3 points location at the caller of debug/info/...
        self.logger.log(level, message, extra={"extra_data": data}, exc_info=exc_info, stacklevel=3)

    def debug(self, message: str, **fields: Any) -> None:
        self._emit(logging.DEBUG, message, fields)

    def info(self, message: str, **fields: Any) -> None:
        self._emit(logging.INFO, message, fields)

    def warning(self, message: str, **fields: Any) -> None:
        self._emit(logging.WARNING, message, fields)

    def error(self, message: str, **fields: Any) -> None:
        self._emit(logging.ERROR, message, fields)

    def exception(self, message: str, **fields: Any) -> None:
        """Error record with the active exception's traceback."""
        self._emit(logging.ERROR, message, fields, exc_info=True)


def setup_logging(
    level: Optional[str] = None,
    json_format: Optional[bool] = None,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    Configure the root logger to write to stderr.

    Unset arguments fall back to ECHO_EXTRACT_LOG_LEVEL and
    ECHO_EXTRACT_LOG_JSON, then to INFO with plain text. A log file, when
    given, always receives JSON lines.
    """
    level = level or os.environ.get(LEVEL_ENV, "INFO")
    if json_format is None:
        json_format = os.environ.get(JSON_ENV, "").lower() in ("1", "true", "yes")

    root = logging.getLogger()
    root.setLevel(getattr(logging, level.upper()))
    for handler in list(root.handlers):
        root.removeHandler(handler)

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(StructuredFormatter() if json_format else FieldsFormatter())
    root.addHandler(console)

    if log_file:
        sink = logging.FileHandler(log_file)
        sink.setFormatter(StructuredFormatter())
        root.addHandler(sink)
    return root


def get_logger(name: str) -> StructuredLogger:
    return StructuredLogger(name)


# ============================================================
# METRICS
# ============================================================

SeriesKey = tuple[str, tuple[tuple[str, str], ...]]


def _series_key(name: str, tags: dict[str, Any]) -> SeriesKey:
    return name, tuple(sorted((k, str(v)) for k, v in tags.items()))


@dataclass
class Metric:
    """One recorded value."""

    name: str
    value: float
    kind: str  # gauge, counter or histogram
    tags: dict[str, Any] = field(default_factory=dict)
    recorded_at: float = field(default_factory=time.time)


class MetricsCollector:
    """
    In-process gauges, counters and histograms.

    Counters and histograms are kept per (name, tags) series. `export`
    returns every recorded value in order; counters export their running
    total.
    """

    def __init__(self) -> None:
        self._records: list[Metric] = []
        self._totals: dict[SeriesKey, float] = {}
        self._samples: dict[SeriesKey, list[float]] = {}

    def gauge(self, name: str, value: float, **tags: Any) -> None:
        self._records.append(Metric(name, float(value), "gauge", tags))

    def increment(self, name: str, value: float = 1.0, **tags: Any) -> None:
        key = _series_key(name, tags)
        self._totals[key] = self._totals.get(key, 0.0) + value
        self._records.append(Metric(name, self._totals[key], "counter", tags))

    def histogram(self, name: str, value: float, **tags: Any) -> None:
        self._samples.setdefault(_series_key(name, tags), []).append(float(value))
        self._records.append(Metric(name, float(value), "histogram", tags))

    @contextmanager
    def timer(self, name: str, **tags: Any) -> Generator[None, None, None]:
        """Record the block's wall time in the histogram `<name>_seconds`."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.histogram(f"{name}_seconds", time.perf_counter() - start, **tags)

    def get_stats(self, name: str) -> dict[str, float]:
        """Summary of a histogram over all its tag sets; empty if never recorded."""
        values = [v for (series, _), samples in self._samples.items() if series == name for v in samples]
        if not values:
            return {}
        arr = np.asarray(values)
        return {
            "count": float(arr.size),
            "min": float(arr.min()),
            "max": float(arr.max()),
            "avg": float(arr.mean()),
            "p50": float(np.percentile(arr, 50)),
            "p99": float(np.percentile(arr, 99)),
        }

    def export(self) -> list[dict[str, Any]]:
        return [
            {"name": m.name, "value": m.value, "kind": m.kind, "tags": dict(m.tags), "recorded_at": m.recorded_at}
            for m in self._records
        ]

    def clear(self) -> None:
        self._records.clear()
        self._totals.clear()
        self._samples.clear()


_metrics = MetricsCollector()


def get_metrics() -> MetricsCollector:
    """Process-wide metrics collector."""
    return _metrics


# ============================================================
# TRAINING INSTRUMENTATION
# ============================================================


class TrainingInstrumentation:
    """Instrumentation hooks for the training loop."""

    def __init__(self) -> None:
        self.logger = get_logger("training")
        self.metrics = get_metrics()

    def on_run_start(self, run_id: str, param_count: int, **fields: Any) -> None:
        """Called once before the first epoch."""
        self.metrics.increment("training_runs_started")
        self.logger.info("Training run started", run_id=run_id, param_count=param_count, **fields)

    def on_epoch_end(
        self, epoch: int, train_loss: float, val_loss: float, lr: float, seconds: float
    ) -> None:
        """Called after validation of each epoch."""
        self.metrics.histogram("epoch_seconds", seconds)
        self.metrics.gauge("train_loss", train_loss, epoch=epoch)
        self.metrics.gauge("val_loss", val_loss, epoch=epoch)
        self.logger.info(
            "Epoch finished",
            epoch=epoch,
            train_loss=train_loss,
            val_loss=val_loss,
            lr=lr,
            seconds=round(seconds, 3),
        )

    def on_lr_change(self, epoch: int, old_lr: float, new_lr: float) -> None:
        """Called when the plateau schedule lowers the learning rate."""
        self.metrics.increment("lr_halvings")
        self.logger.info("Learning rate reduced", epoch=epoch, old_lr=old_lr, new_lr=new_lr)

    def on_checkpoint(self, path: str, epoch: int, best: bool) -> None:
        """Called after a checkpoint is written."""
        self.metrics.increment("checkpoints_written", best=best)
        self.logger.debug("Checkpoint written", path=path, epoch=epoch, best=best)

    def on_divergence(self, epoch: int, batch: int, grad_norms: dict[str, float]) -> None:
        """Called when a non-finite loss aborts training."""
        self.metrics.increment("training_divergences")
        worst = sorted(grad_norms.items(), key=lambda kv: -kv[1])[:5]
        self.logger.error("Training diverged", epoch=epoch, batch=batch, largest_grad_norms=worst)

    def on_early_stop(self, epoch: int, best_epoch: int) -> None:
        """Called when early stopping ends the run."""
        self.logger.info("Early stopping", epoch=epoch, best_epoch=best_epoch)


_instrumentation = TrainingInstrumentation()


def get_instrumentation() -> TrainingInstrumentation:
    """Get the global instrumentation."""
    return _instrumentation
