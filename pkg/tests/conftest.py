"""
Shared Test Fixtures
=====================

Pytest fixtures for echo extraction tests: tiny float64 model
configurations, a small synthetic source bank and a handful of
pre-generated scenes.
"""

import numpy as np
import pytest

# ============================================================
# RANDOMNESS AND SIGNALS
# ============================================================


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(0)


@pytest.fixture
def noise(rng):
    """One second of white noise."""
    return rng.normal(size=8000)


# ============================================================
# MODEL FIXTURES
# ============================================================


@pytest.fixture
def tiny_tcn_config():
    """Two-block TCN small enough for finite-difference checks."""
    from src.networks import EncoderConfig, ModelConfig, TcnConfig

    return ModelConfig(
        arch="tcn",
        sample_rate=8000,
        dtype="float64",
        encoder=EncoderConfig(window=8, stride=4, channels=6),
        tcn=TcnConfig(bottleneck_channels=4, hidden_channels=5, kernel_size=3, blocks_per_repeat=2, repeats=1),
    )


@pytest.fixture
def tiny_dprnn_config():
    """One-block DPRNN with four-frame chunks."""
    from src.networks import DprnnConfig, EncoderConfig, ModelConfig

    return ModelConfig(
        arch="dprnn",
        sample_rate=8000,
        dtype="float64",
        encoder=EncoderConfig(window=8, stride=4, channels=6),
        dprnn=DprnnConfig(bottleneck=4, chunk=4, hidden=3, blocks_per_stack=1),
    )


@pytest.fixture
def tiny_model(tiny_dprnn_config):
    """Initialized tiny DPRNN-TV model."""
    from src.networks import ExtractionModel

    return ExtractionModel(tiny_dprnn_config, seed=0)


# ============================================================
# SCENE FIXTURES
# ============================================================


@pytest.fixture(scope="session")
def small_bank():
    """Synthetic test-split bank at 8 kHz, two sources per class."""
    from src.scenes import SourceBank

    return SourceBank.synthetic("test", sample_rate=8000, seconds=0.6, per_class=2)


@pytest.fixture(scope="session")
def small_settings():
    """Quarter-second 8 kHz scenes drawn from a two-room geometry bank."""
    from src.scenes import SceneSettings

    return SceneSettings(sample_rate=8000, scene_seconds=0.25, geometry_bank_size=2)


@pytest.fixture(scope="session")
def small_scenes(small_bank, small_settings):
    """Four test scenes; shared, so tests must not modify them."""
    from src.scenes import dataset_iter

    return list(dataset_iter("test", 0, 4, small_bank, small_settings))


# ============================================================
# SINGLETONS
# ============================================================


@pytest.fixture(autouse=True)
def reset_metrics():
    """Clear the global metrics collector around every test."""
    from src.observability import get_metrics

    get_metrics().clear()
    yield
    get_metrics().clear()
