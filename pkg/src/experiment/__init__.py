"""
Experiments
===========

Experiment configs and presets, echo estimators, manifest evaluation,
the speaker switch demo and the TI/TV fusion comparison.
"""

from .compare import FusionComparison, SeedResult, compare_fusion
from .config import (
    PRESETS,
    DataConfig,
    ExperimentConfig,
    PathsConfig,
    config_hash,
    desk_preset,
    emit_config,
    full_preset,
    load_experiment,
    parse_config,
    parse_config_text,
    preset,
)
from .demo import SwitchDemoResult, run_switch_demo, switch_scene
from .estimators import (
    EchoEstimator,
    ModelEstimator,
    OracleEstimator,
    ZeroEstimator,
    make_estimator,
)
from .evaluate import (
    TABLE_COLUMNS,
    evaluate_manifest,
    evaluate_scene,
    evaluate_scenes,
    write_evaluation,
    write_table,
)

__all__ = [
    "PRESETS",
    "TABLE_COLUMNS",
    "DataConfig",
    "EchoEstimator",
    "ExperimentConfig",
    "FusionComparison",
    "ModelEstimator",
    "OracleEstimator",
    "PathsConfig",
    "SeedResult",
    "SwitchDemoResult",
    "ZeroEstimator",
    "compare_fusion",
    "config_hash",
    "desk_preset",
    "emit_config",
    "full_preset",
    "evaluate_manifest",
    "evaluate_scene",
    "evaluate_scenes",
    "load_experiment",
    "make_estimator",
    "parse_config",
    "parse_config_text",
    "preset",
    "run_switch_demo",
    "switch_scene",
    "write_evaluation",
    "write_table",
]
