"""
Echo Extract CLI
================

Command-line interface for data generation, training and evaluation.

Usage:
    echo-extract gen-rir         # Simulate one room impulse response
    echo-extract gen-scenes      # Export scenes and a manifest
    echo-extract train           # Train an extraction model
    echo-extract eval            # Per-subset SI-SDRi table for a manifest
    echo-extract demo-switch     # Far-end speaker switch demo
"""

import hashlib
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import track
from rich.table import Table

from .errors import EchoExtractError

# Load .env file if present
try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:
    pass

__version__ = "0.1.0"

app = typer.Typer(
    name="echo-extract",
    help="Informed echo extraction with time-invariant and time-variant reference embeddings",
    add_completion=False,
)

console = Console()

SPLIT_NAMES = {"train": "train", "val": "validation", "validation": "validation", "test": "test"}


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", "-l", help="Logging level (default INFO)"),
    json_logs: bool = typer.Option(False, "--json-logs", help="Emit JSON log lines"),
) -> None:
    """Configure logging for every command."""
    from .observability import setup_logging

    setup_logging(level=log_level, json_format=json_logs or None)


def _fail(error: Exception) -> None:
    console.print(f"[red]Error:[/red] {error}")
    raise typer.Exit(1)


def _parse_room(text: str) -> tuple[float, float, float]:
    try:
        w, d, h = (float(v) for v in text.lower().split("x"))
    except ValueError as e:
        raise typer.BadParameter(f"Room must look like WxLxH, got {text!r}") from e
    return w, d, h


# ============================================================
# GEN-RIR COMMAND
# ============================================================


@app.command("gen-rir")
def gen_rir(
    room: str = typer.Option(..., "--room", "-r", help="Room dimensions WxLxH in metres"),
    t60: float = typer.Option(..., "--t60", help="Reverberation time in seconds (0 = anechoic)"),
    distance: float = typer.Option(..., "--distance", "-d", help="Source-microphone distance in metres"),
    out: Path = typer.Option(..., "--out", "-o", help="Output WAV path"),
    seed: int = typer.Option(0, "--seed", "-s", help="Placement seed"),
    sample_rate: int = typer.Option(16000, "--sample-rate", help="Sample rate in Hz"),
) -> None:
    """Simulate one RIR and write it as WAV plus a JSON sidecar."""
    from .acoustics import RirRequest, RoomSpec, direct_path, place_source, sample_mic, simulate_rir, write_rir

    spec = RoomSpec.of(_parse_room(room))
    rng = np.random.default_rng(seed)
    try:
        mic = sample_mic(spec, rng)
        source = place_source(spec, mic, distance, rng)
        request = RirRequest(room=spec, t60=t60, source=source, mic=mic, sample_rate=sample_rate)
        rir = simulate_rir(request)
    except EchoExtractError as e:
        _fail(e)
        return

    digest = hashlib.sha256(request.model_dump_json().encode("utf-8")).hexdigest()[:12]
    write_rir(out, rir, config_hash=digest)
    delay, amplitude = direct_path(rir)

    table = Table(title="Room Impulse Response")
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    table.add_row("Room", f"{spec.width} x {spec.length} x {spec.height} m")
    table.add_row("T60", f"{t60:.2f} s")
    table.add_row("Length", f"{len(rir)} samples")
    table.add_row("Max order", str(rir.max_order))
    table.add_row("Direct path", f"{delay:.2f} samples, amplitude {amplitude:.4f}")
    table.add_row("Config hash", digest)
    console.print(table)
    console.print(f"Wrote [cyan]{out}[/cyan]")


# ============================================================
# GEN-SCENES COMMAND
# ============================================================


@app.command("gen-scenes")
def gen_scenes(
    split: str = typer.Option("test", "--split", help="train, val or test"),
    count: int = typer.Option(..., "--count", "-n", help="Number of scenes"),
    out: Path = typer.Option(..., "--out", "-o", help="Output directory"),
    seed: int = typer.Option(0, "--seed", "-s", help="Stream seed"),
    subset: Optional[str] = typer.Option(None, "--subset", help="Force SS, SN, NS or NN"),
    switch_scenario: bool = typer.Option(False, "--switch-scenario", help="Far-end speaker switch scenes"),
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Experiment config (desk preset if omitted)"),
) -> None:
    """Export scenes (mixture, echo, near-end, reference WAVs) and manifest.jsonl."""
    from .experiment import config_hash, load_experiment, switch_scene
    from .scenes import SUBSET_TAGS, dataset_iter, manifest_entry, write_manifest, write_scene

    if split not in SPLIT_NAMES:
        raise typer.BadParameter(f"Unknown split {split!r}")
    if subset is not None and subset not in SUBSET_TAGS:
        raise typer.BadParameter(f"Unknown subset {subset!r}")
    try:
        experiment = load_experiment(config)
    except EchoExtractError as e:
        _fail(e)
        return
    digest = config_hash(experiment)
    split_name = SPLIT_NAMES[split]
    settings = experiment.data.scene_settings()
    if split_name != "train":
        settings = settings.model_copy(update={f"{split_name}_seed": seed})

    if switch_scenario:
        scenes = (switch_scene(settings.sample_rate, seed + i) for i in range(count))
    else:
        bank = experiment.data.source_bank(split_name)  # type: ignore[arg-type]
        scenes = dataset_iter(
            split_name, seed, count, bank, settings, subset=subset, workers=experiment.data.workers  # type: ignore[arg-type]
        )

    entries = []
    for index, scene in enumerate(track(scenes, total=count, description="Generating scenes")):
        relative = Path(f"scene_{index:06d}")
        write_scene(out / relative, scene, config_hash=digest)
        entries.append(manifest_entry(scene, relative, config_hash=digest))
    write_manifest(out / "manifest.jsonl", entries)
    console.print(f"Wrote [bold]{len(entries)}[/bold] scenes to [cyan]{out}[/cyan] (config {digest})")


# ============================================================
# TRAIN COMMAND
# ============================================================


@app.command()
def train(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Experiment config (desk preset if omitted)"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Run directory (config paths.out_dir if omitted)"),
    resume: bool = typer.Option(False, "--resume", help="Continue from last.isec in the run directory"),
) -> None:
    """Train an extraction model and write checkpoints and the training log."""
    from .experiment import config_hash, emit_config, load_experiment
    from .networks import param_count
    from .training import train as run_training

    try:
        experiment = load_experiment(config)
    except EchoExtractError as e:
        _fail(e)
        return
    out_dir = out or Path(experiment.paths.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.yaml").write_text(emit_config(experiment))
    digest = config_hash(experiment)

    model = experiment.model
    console.print(
        Panel.fit(
            f"[bold blue]{model.arch.upper()}-{model.fusion}[/bold blue]"
            f"{' causal' if model.causal else ''}, {param_count(model):,} parameters",
            subtitle=f"config {digest}",
        )
    )
    try:
        result = run_training(
            experiment.model,
            experiment.train,
            experiment.data.source_bank("train"),
            experiment.data.source_bank("validation"),
            experiment.data.scene_settings(),
            out_dir=out_dir,
            resume=resume,
            run_info={"config_hash": digest, "seed": experiment.train.seed},
            scene_workers=experiment.data.workers,
        )
    except (EchoExtractError, FileNotFoundError) as e:
        _fail(e)
        return

    table = Table(title="Training")
    for column in ("epoch", "train loss", "val loss", "lr"):
        table.add_column(column, justify="right")
    for r in result.history[-10:]:
        table.add_row(str(r.epoch), f"{r.train_loss:.3f}", f"{r.val_loss:.3f}", f"{r.lr:.2e}")
    console.print(table)
    stop = " (early stop)" if result.stopped_early else ""
    console.print(f"Best epoch [bold]{result.best_epoch}[/bold]{stop}; checkpoints in [cyan]{out_dir}[/cyan]")


# ============================================================
# EVAL COMMAND
# ============================================================


def _report_table(row: dict[str, str], title: str) -> Table:
    from .experiment import TABLE_COLUMNS

    table = Table(title=title)
    for column in TABLE_COLUMNS:
        table.add_column(column, justify="right")
    table.add_row(*(row[c] for c in TABLE_COLUMNS))
    return table


@app.command("eval")
def evaluate(
    manifest: Path = typer.Option(..., "--manifest", "-m", help="Scene manifest (manifest.jsonl)"),
    out: Path = typer.Option(..., "--out", "-o", help="Output directory"),
    checkpoint: Optional[Path] = typer.Option(None, "--checkpoint", help="Model checkpoint (.isec)"),
    stub: Optional[str] = typer.Option(None, "--stub", help="oracle or zero instead of a checkpoint"),
    workers: int = typer.Option(1, "--workers", "-w", help="Evaluation threads"),
) -> None:
    """SI-SDRi per example and per subset (SS, SN, NS, NN, mean)."""
    from .experiment import evaluate_manifest, make_estimator, write_evaluation
    from .scenes import read_manifest

    try:
        estimator = make_estimator(checkpoint, stub)  # type: ignore[arg-type]
        entries = read_manifest(manifest)
        hashes = {e.config_hash for e in entries}
        report = evaluate_manifest(estimator, entries, config_hash=",".join(sorted(hashes)), workers=workers)
    except (EchoExtractError, ValueError) as e:
        _fail(e)
        return

    write_evaluation(out, report)
    console.print(_report_table(report.table_row(), f"SI-SDRi (dB), {estimator.name}, {len(entries)} scenes"))
    console.print(f"Wrote [cyan]{out}[/cyan]")


# ============================================================
# DEMO-SWITCH COMMAND
# ============================================================


@app.command("demo-switch")
def demo_switch(
    checkpoint: Path = typer.Option(..., "--checkpoint", help="Model checkpoint (.isec)"),
    out: Path = typer.Option(..., "--out", "-o", help="Output directory"),
    seed: int = typer.Option(0, "--seed", "-s", help="Scene seed"),
) -> None:
    """Run the speaker switch scene and write CSV and SVG artifacts."""
    from .experiment import run_switch_demo
    from .training import load_checkpoint

    try:
        model = load_checkpoint(checkpoint).to_model()
        result = run_switch_demo(model, out, seed=seed)
    except EchoExtractError as e:
        _fail(e)
        return
    console.print(
        f"ERLE over {len(result.erle)} frames, mean {float(np.mean(result.erle)):.2f} dB; "
        f"wrote [cyan]{out}[/cyan]"
    )


# ============================================================
# CONFIG AND MODEL COMMANDS
# ============================================================


@app.command("init-config")
def init_config(
    preset_name: str = typer.Option("desk", "--preset", "-p", help="full or desk"),
    out: Path = typer.Option(Path("config.yaml"), "--out", "-o", help="Output YAML file"),
) -> None:
    """Write the canonical YAML of a preset."""
    from .experiment import config_hash, emit_config, preset

    try:
        experiment = preset(preset_name)  # type: ignore[arg-type]
    except EchoExtractError as e:
        _fail(e)
        return
    out.write_text(emit_config(experiment))
    console.print(f"Wrote [cyan]{out}[/cyan] ({preset_name}, config {config_hash(experiment)})")


@app.command("model-size")
def model_size() -> None:
    """Parameter counts of the full-scale models against their reference sizes."""
    from .networks import REFERENCE_SIZES, param_count, reference_configs

    table = Table(title="Model Size")
    table.add_column("Model", style="cyan")
    table.add_column("Parameters", justify="right")
    table.add_column("Reference", justify="right")
    table.add_column("Deviation", justify="right")
    for name, model_config in reference_configs().items():
        count = param_count(model_config)
        reference = REFERENCE_SIZES[name]
        table.add_row(name, f"{count / 1e6:.3f}M", f"{reference / 1e6:.2f}M", f"{100 * (count - reference) / reference:+.1f}%")
    console.print(table)


@app.command("compare-fusion")
def compare_fusion(
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Experiment config (desk preset if omitted)"),
    seeds: int = typer.Option(3, "--seeds", help="Number of training seeds"),
    out: Path = typer.Option(Path("runs/compare"), "--out", "-o", help="Output directory"),
    test_count: int = typer.Option(100, "--test-count", help="Fixed test scenes"),
) -> None:
    """Train TI and TV variants per seed and compare test SI-SDRi."""
    from .experiment import compare_fusion as run_comparison
    from .experiment import load_experiment

    try:
        result = run_comparison(load_experiment(config), seeds, out, test_count)
    except EchoExtractError as e:
        _fail(e)
        return

    table = Table(title="TI vs TV SI-SDRi (dB)")
    for column in ("seed", "TI", "TV", "TV - TI"):
        table.add_column(column, justify="right")
    for s in result.seeds:
        table.add_row(str(s.seed), f"{s.ti_si_sdri:.2f}", f"{s.tv_si_sdri:.2f}", f"{s.gap:+.2f}")
    console.print(table)
    console.print(f"Median gap [bold]{result.median_gap:+.2f} dB[/bold], TV ahead on {result.tv_wins}/{len(result.seeds)} seeds")


# ============================================================
# VERSION
# ============================================================


@app.command()
def version() -> None:
    """Show version information."""
    console.print(
        Panel.fit(
            "[bold blue]Echo Extract[/bold blue]\n"
            f"Version: {__version__}\n"
            "Informed acoustic echo extraction with TI and TV reference embeddings",
            title="About",
        )
    )


# ============================================================
# MAIN
# ============================================================

if __name__ == "__main__":
    app()
