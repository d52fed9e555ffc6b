"""
Speaker Switch Demo
===================

Runs a model on the far-end speaker switch scene: speaker A plays from
0.85 m for one segment, then speaker B from 1.35 m, while a near-end
talker is active throughout. Writes waveforms, the ERLE curve and the
embedding deviation map as CSV, with SVG renderings of each.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from ..acoustics import TEST_POOL, RirRequest, RoomSpec, place_source, sample_mic, simulate_rir
from ..metrics import embedding_deviation_map, erle_curve, write_erle_csv
from ..networks import ExtractionModel
from ..observability import get_logger
from ..scenes import AerScene, SourceBank, build_switch_scenario
from . import svg

logger = get_logger(__name__)

SWITCH_DISTANCES = (0.85, 1.35)
NEAR_DISTANCE = 1.35
DEMO_T60 = 0.25


@dataclass
class SwitchDemoResult:
    """Signals and curves of one switch demo run."""

    scene: AerScene
    echo_estimate: np.ndarray
    erle: np.ndarray
    deviation: np.ndarray


def switch_scene(sample_rate: int, seed: int = 0, segment_seconds: float = 2.0, sir_db: float = 0.0) -> AerScene:
    """Switch scene in the first test room; positions drawn from `seed`."""
    rng = np.random.default_rng(seed)
    bank = SourceBank.synthetic("test", sample_rate, seconds=2 * segment_seconds + 0.5, per_class=3, seed=seed)
    speaker_a, speaker_b, near_talker = bank.by_kind("speech")[:3]

    room = RoomSpec.of(TEST_POOL.rooms[0])
    mic = sample_mic(room, rng)

    def rir(distance: float) -> np.ndarray:
        source = place_source(room, mic, distance, rng)
        request = RirRequest(room=room, t60=DEMO_T60, source=source, mic=mic, sample_rate=sample_rate)
        return simulate_rir(request).taps

    rir_a, rir_b = rir(SWITCH_DISTANCES[0]), rir(SWITCH_DISTANCES[1])
    return build_switch_scenario(
        speaker_a.waveform,
        speaker_b.waveform,
        rir_a,
        rir_b,
        near_talker.waveform,
        rir(NEAR_DISTANCE),
        sir_db=sir_db,
        sample_rate=sample_rate,
        segment_seconds=segment_seconds,
        scene_id=f"switch-{seed}",
        split="test",
        seed=seed,
        t60=DEMO_T60,
        room=tuple(float(d) for d in room.dims),
        mic=mic,
    )


def _write_waveforms(path: Path, scene: AerScene, echo_estimate: np.ndarray) -> None:
    near_estimate = scene.mixture - echo_estimate
    times = np.arange(len(scene)) / scene.sample_rate
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["time_s", "mixture", "near_end", "near_estimate", "echo", "echo_estimate"])
        for row in zip(times, scene.mixture, scene.near_end, near_estimate, scene.echo, echo_estimate):
            writer.writerow([f"{v:.6g}" for v in row])


def run_switch_demo(
    model: ExtractionModel, out_dir: Union[str, Path], seed: int = 0, segment_seconds: float = 2.0
) -> SwitchDemoResult:
    """Write waveforms.csv, erle.csv, embedding_deviation.csv, demo.json and three SVGs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene = switch_scene(model.config.sample_rate, seed, segment_seconds)
    output = model.forward(scene.mixture, scene.reference)
    echo_estimate = output.estimate.data.astype(np.float64)
    series = erle_curve(scene.echo, echo_estimate, scene.sample_rate)
    deviation = embedding_deviation_map(output.embeddings)

    _write_waveforms(out_dir / "waveforms.csv", scene, echo_estimate)
    write_erle_csv(out_dir / "erle.csv", series)
    np.savetxt(out_dir / "embedding_deviation.csv", deviation, delimiter=",", fmt="%.6g")

    times = np.arange(len(scene)) / scene.sample_rate
    svg.line_plot(
        out_dir / "waveforms.svg",
        times,
        {"mixture": scene.mixture, "near-end estimate": scene.mixture - echo_estimate},
        title="Speaker switch",
    )
    svg.line_plot(out_dir / "erle.svg", series.times, {"ERLE (dB)": series.values}, title="ERLE")
    svg.heatmap(out_dir / "embedding_deviation.svg", deviation, title="Embedding deviation")

    switch_time = segment_seconds
    summary = {
        "scene": scene.metadata.model_dump(mode="json"),
        "erle_frames": len(series),
        "erle_mean_before_switch": float(np.mean(series.values[series.times < switch_time])),
        "erle_mean_after_switch": float(np.mean(series.values[series.times >= switch_time])),
        "embedding_shape": list(deviation.shape),
    }
    (out_dir / "demo.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    logger.info("Switch demo written", out_dir=str(out_dir), erle_frames=len(series))
    return SwitchDemoResult(scene=scene, echo_estimate=echo_estimate, erle=series.values, deviation=deviation)
