"""
Observability Tests
===================

Tests for logging and metrics including:
- JSON log formatting with extra fields
- Logger context
- Metric counters, histograms and timers
- Training instrumentation hooks
"""

import json
import logging

import numpy as np

from src.observability import (
    FieldsFormatter,
    StructuredFormatter,
    get_instrumentation,
    get_logger,
    get_metrics,
    loggable,
    setup_logging,
)


def make_record(message: str, level: int = logging.INFO, **extra) -> logging.LogRecord:
    record = logging.LogRecord("test", level, __file__, 10, message, None, None)
    record.extra_data = extra
    return record


class TestLogging:
    """Test structured logging."""

    def test_json_fields(self):
        """Extra fields are merged into the JSON line."""
        line = StructuredFormatter().format(make_record("Epoch finished", epoch=3, val_loss=-4.5))
        data = json.loads(line)
        assert data["message"] == "Epoch finished"
        assert data["epoch"] == 3
        assert data["val_loss"] == -4.5
        assert "location" not in data

    def test_warnings_carry_location(self):
        """Warnings and errors record where they were logged."""
        data = json.loads(StructuredFormatter().format(make_record("Redrawing", logging.WARNING)))
        assert data["location"]["line"] == 10

    def test_numpy_fields(self):
        """Numpy scalars become numbers; large arrays become a shape summary."""
        assert loggable(np.float32(0.5)) == 0.5
        assert loggable({"norms": (np.int64(2), np.zeros(3))}) == {"norms": [2, [0.0, 0.0, 0.0]]}
        assert loggable(np.zeros((4, 8))) == {"shape": [4, 8], "dtype": "float64"}

    def test_plain_text_appends_fields(self):
        """The console format lists fields after the message."""
        line = FieldsFormatter().format(make_record("Saved checkpoint", epoch=2, path="last.isec"))
        assert line.endswith('| Saved checkpoint | epoch=2 path="last.isec"')

    def test_context_is_inherited(self):
        """with_context adds fields without touching the parent."""
        parent = get_logger("scenes")
        child = parent.with_context(split="test")
        assert child._context == {"split": "test"}
        assert parent._context == {}

    def test_setup_from_environment(self, monkeypatch):
        """Level and format fall back to environment variables."""
        monkeypatch.setenv("ECHO_EXTRACT_LOG_LEVEL", "WARNING")
        monkeypatch.setenv("ECHO_EXTRACT_LOG_JSON", "true")
        root = setup_logging()
        try:
            assert root.level == logging.WARNING
            assert isinstance(root.handlers[0].formatter, StructuredFormatter)
        finally:
            setup_logging(level="INFO", json_format=False)


class TestMetrics:
    """Test the metrics collector."""

    def test_counter_accumulates_per_tag_set(self):
        """Counters with different tags are kept apart."""
        metrics = get_metrics()
        metrics.increment("checkpoints_written", best=True)
        metrics.increment("checkpoints_written", best=True)
        metrics.increment("checkpoints_written", best=False)
        values = [m["value"] for m in metrics.export() if m["tags"] == {"best": True}]
        assert values == [1.0, 2.0]

    def test_timer_appends_seconds(self):
        """Timers record a histogram named <name>_seconds."""
        metrics = get_metrics()
        with metrics.timer("simulation"):
            pass
        stats = metrics.get_stats("simulation_seconds")
        assert stats["count"] == 1
        assert stats["min"] >= 0

    def test_unknown_histogram(self):
        """Stats of an unrecorded name are empty."""
        assert get_metrics().get_stats("nothing") == {}


class TestInstrumentation:
    """Test the training hooks."""

    def test_epoch_end_records_losses(self):
        """Epoch hooks record losses and the epoch duration."""
        get_instrumentation().on_epoch_end(2, -3.0, -2.5, 1e-3, 0.5)
        exported = get_metrics().export()
        assert {"train_loss", "val_loss", "epoch_seconds"} <= {m["name"] for m in exported}
        assert get_metrics().get_stats("epoch_seconds")["max"] == 0.5

    def test_divergence_counted(self):
        """Divergence increments its counter even with NaN norms."""
        get_instrumentation().on_divergence(1, 4, {"a": float("nan"), "b": 2.0})
        assert any(m["name"] == "training_divergences" for m in get_metrics().export())
