"""
Evaluation
==========

Per-example SI-SDR in and out, SI-SDRi, echo SDR and ERLE over a manifest of
exported scenes, summarized per subset in the SS / SN / NS / NN / mean
table layout.
"""

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Sequence, Union

from ..metrics import (
    SUBSETS,
    ExampleMetrics,
    MetricReport,
    erle_curve,
    erle_points,
    near_end_estimate,
    sdr,
    si_sdr,
    summarize,
)
from ..observability import get_logger, get_metrics
from ..scenes import AerScene, ManifestEntry, read_scene
from .estimators import EchoEstimator

logger = get_logger(__name__)

TABLE_COLUMNS = (*SUBSETS, "mean")
TABLE_FILE = "table.csv"
EXAMPLES_FILE = "examples.json"
REPORT_FILE = "report.json"


def evaluate_scene(estimator: EchoEstimator, scene: AerScene) -> ExampleMetrics:
    echo_estimate = estimator.estimate_echo(scene)
    near = near_end_estimate(scene.mixture, echo_estimate)
    series = erle_curve(scene.echo, echo_estimate, scene.sample_rate)
    return ExampleMetrics(
        scene_id=scene.metadata.scene_id,
        subset=scene.subset,
        si_sdr_in=si_sdr(scene.mixture, scene.near_end),
        si_sdr_out=si_sdr(near, scene.near_end),
        sdr_echo=sdr(scene.echo, echo_estimate),
        erle_mean=series.mean(),
        erle_series=erle_points(series),
    )


def evaluate_scenes(
    estimator: EchoEstimator,
    scenes: Iterable[AerScene],
    config_hash: str = "",
    workers: int = 1,
) -> MetricReport:
    """Evaluate in input order; workers only change throughput."""
    with get_metrics().timer("evaluation", estimator=estimator.name):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                examples = list(executor.map(lambda s: evaluate_scene(estimator, s), scenes))
        else:
            examples = [evaluate_scene(estimator, s) for s in scenes]
    report = summarize(examples, config_hash=config_hash, estimator=estimator.name)
    logger.info("Evaluation finished", estimator=estimator.name, examples=len(examples), mean_si_sdri=report.mean_si_sdri)
    return report


def evaluate_manifest(
    estimator: EchoEstimator,
    entries: Sequence[ManifestEntry],
    config_hash: str = "",
    workers: int = 1,
) -> MetricReport:
    scenes = (read_scene(entry.path) for entry in entries)
    return evaluate_scenes(estimator, scenes, config_hash, workers)


def write_table(path: Union[str, Path], report: MetricReport) -> Path:
    path = Path(path)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=TABLE_COLUMNS)
        writer.writeheader()
        writer.writerow(report.table_row())
    return path


def write_evaluation(out_dir: Union[str, Path], report: MetricReport) -> Path:
    """Write examples.json, report.json and table.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    examples = [e.model_dump() for e in report.examples]
    (out_dir / EXAMPLES_FILE).write_text(json.dumps(examples, indent=2, sort_keys=True))
    report.to_json(out_dir / REPORT_FILE)
    write_table(out_dir / TABLE_FILE, report)
    return out_dir
