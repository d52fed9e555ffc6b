"""
CLI Tests
=========

Tests for the echo-extract command line including:
- gen-rir output files and error exit codes
- gen-scenes followed by stub evaluation
- init-config, model-size and version
- A tiny train, eval and demo-switch run
"""

import csv
import json

import pytest
from typer.testing import CliRunner

from src.cli import app

runner = CliRunner()


@pytest.fixture
def tiny_config_file(tmp_path, tiny_dprnn_config):
    """YAML config for 8 kHz quarter-second scenes and a one-epoch run."""
    from src.experiment import DataConfig, ExperimentConfig, emit_config
    from src.training import TrainConfig

    config = ExperimentConfig(
        model=tiny_dprnn_config,
        train=TrainConfig(max_epochs=1, train_per_epoch=2, val_per_epoch=2, batch_size=2),
        data=DataConfig(sample_rate=8000, scene_seconds=0.25, source_seconds=0.6, sources_per_class=2, geometry_bank_size=2),
    )
    path = tmp_path / "tiny.yaml"
    path.write_text(emit_config(config))
    return path


class TestGenRir:
    """Test the gen-rir command."""

    def test_anechoic(self, tmp_path):
        """t60 0 writes a WAV and its sidecar."""
        out = tmp_path / "rir.wav"
        result = runner.invoke(app, ["gen-rir", "--room", "3.0x5.0x3.0", "--t60", "0", "--distance", "0.85", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()
        sidecar = json.loads((tmp_path / "rir.json").read_text())
        assert sidecar["max_order"] == 0

    def test_test_pool_row(self, tmp_path):
        """A reverberant test-pool room succeeds."""
        out = tmp_path / "rev.wav"
        result = runner.invoke(
            app, ["gen-rir", "--room", "3.0x5.0x3.0", "--t60", "0.25", "--distance", "0.85", "--out", str(out), "--sample-rate", "8000"]
        )
        assert result.exit_code == 0, result.output
        assert "2000 samples" in result.output

    def test_unachievable_t60(self, tmp_path):
        """Impossible absorption exits with code 1."""
        result = runner.invoke(
            app, ["gen-rir", "--room", "2x4x2.7", "--t60", "0.05", "--distance", "0.5", "--out", str(tmp_path / "x.wav")]
        )
        assert result.exit_code == 1
        assert "unachievable T60" in result.output

    def test_malformed_room(self, tmp_path):
        """Room strings must be WxLxH."""
        result = runner.invoke(app, ["gen-rir", "--room", "big", "--t60", "0", "--distance", "1", "--out", str(tmp_path / "x.wav")])
        assert result.exit_code == 2


class TestScenesAndEval:
    """Test scene export and stub evaluation."""

    def test_zero_stub_table(self, tmp_path, tiny_config_file):
        """Zero-stub evaluation of exported scenes gives 0.00 mean SI-SDRi."""
        scenes = tmp_path / "scenes"
        result = runner.invoke(app, ["gen-scenes", "--count", "3", "--out", str(scenes), "--config", str(tiny_config_file)])
        assert result.exit_code == 0, result.output
        assert len((scenes / "manifest.jsonl").read_text().splitlines()) == 3

        out = tmp_path / "eval"
        result = runner.invoke(app, ["eval", "--manifest", str(scenes / "manifest.jsonl"), "--out", str(out), "--stub", "zero"])
        assert result.exit_code == 0, result.output
        with (out / "table.csv").open() as f:
            rows = list(csv.DictReader(f))
        assert rows[0]["mean"] == "0.00"

    def test_forced_subset(self, tmp_path, tiny_config_file):
        """--subset fixes every exported scene's tag."""
        scenes = tmp_path / "nn"
        result = runner.invoke(
            app, ["gen-scenes", "--count", "2", "--subset", "NN", "--out", str(scenes), "--config", str(tiny_config_file)]
        )
        assert result.exit_code == 0, result.output
        lines = (scenes / "manifest.jsonl").read_text().splitlines()
        assert all(json.loads(line)["subset"] == "NN" for line in lines)

    def test_unknown_subset(self, tmp_path):
        """Subset tags are validated."""
        result = runner.invoke(app, ["gen-scenes", "--count", "1", "--subset", "XX", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_bad_config(self, tmp_path):
        """A misspelled key exits with code 1 and names the key."""
        bad = tmp_path / "bad.yaml"
        bad.write_text("train:\n  learnin_rate: 0.1\n")
        result = runner.invoke(app, ["gen-scenes", "--count", "1", "--out", str(tmp_path / "s"), "--config", str(bad)])
        assert result.exit_code == 1
        assert "train.learnin_rate" in result.output

    def test_eval_needs_one_estimator(self, tmp_path):
        """Neither checkpoint nor stub is an error."""
        manifest = tmp_path / "manifest.jsonl"
        manifest.write_text("")
        result = runner.invoke(app, ["eval", "--manifest", str(manifest), "--out", str(tmp_path / "e")])
        assert result.exit_code == 1


class TestConfigCommands:
    """Test config and information commands."""

    def test_init_config_round_trips(self, tmp_path):
        """The written preset parses back to itself."""
        from src.experiment import desk_preset, parse_config

        out = tmp_path / "desk.yaml"
        result = runner.invoke(app, ["init-config", "--preset", "desk", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert parse_config(out) == desk_preset()

    def test_init_config_unknown_preset(self, tmp_path):
        """Unknown presets exit with code 1."""
        result = runner.invoke(app, ["init-config", "--preset", "huge", "--out", str(tmp_path / "x.yaml")])
        assert result.exit_code == 1

    def test_model_size(self):
        """model-size lists the three full-scale models."""
        result = runner.invoke(app, ["model-size"])
        assert result.exit_code == 0, result.output
        for name in ("TCN", "DPRNN", "causal DPRNN"):
            assert name in result.output

    def test_version(self):
        """version prints the package version."""
        from src.cli import __version__

        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert __version__ in result.output


class TestTrainingCommands:
    """Test train, eval with a checkpoint and the switch demo."""

    @pytest.mark.slow
    def test_train_eval_demo(self, tmp_path, tiny_config_file):
        """A one-epoch run feeds evaluation and the switch demo."""
        run = tmp_path / "run"
        result = runner.invoke(app, ["train", "--config", str(tiny_config_file), "--out", str(run)])
        assert result.exit_code == 0, result.output
        for name in ("last.isec", "best.isec", "train_log.csv", "run.json", "config.yaml"):
            assert (run / name).exists()

        scenes = tmp_path / "scenes"
        runner.invoke(app, ["gen-scenes", "--count", "2", "--out", str(scenes), "--config", str(tiny_config_file)])
        result = runner.invoke(
            app,
            ["eval", "--manifest", str(scenes / "manifest.jsonl"), "--out", str(tmp_path / "eval"), "--checkpoint", str(run / "best.isec")],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "eval" / "report.json").exists()

        result = runner.invoke(app, ["demo-switch", "--checkpoint", str(run / "best.isec"), "--out", str(tmp_path / "demo")])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "demo" / "erle.svg").exists()

    def test_resume_without_checkpoint(self, tmp_path, tiny_config_file):
        """Resuming an empty run directory exits with code 1."""
        result = runner.invoke(app, ["train", "--config", str(tiny_config_file), "--out", str(tmp_path / "r"), "--resume"])
        assert result.exit_code == 1
