"""
Scene Export
============

One directory per scene (mixture.wav, echo.wav, near.wav, ref.wav and
scene.json) and a JSON-lines manifest of exported scenes.
"""

import json
from pathlib import Path
from typing import Iterable, Union

from pydantic import BaseModel, ConfigDict

from ..dsp import Waveform, read_wav, write_wav
from ..errors import SceneError
from .mixing import AerScene, SceneMetadata, SubsetTag

PathLike = Union[str, Path]

SCENE_FILES = {
    "mixture": "mixture.wav",
    "echo": "echo.wav",
    "near_end": "near.wav",
    "reference": "ref.wav",
}
METADATA_FILE = "scene.json"


class ManifestEntry(BaseModel):
    """One line of a scene manifest."""

    model_config = ConfigDict(extra="forbid")

    id: str
    path: str
    subset: SubsetTag
    sir_db: float
    config_hash: str = ""


def write_scene(directory: PathLike, scene: AerScene, config_hash: str = "") -> Path:
    """Write the four signals as float32 WAV plus the metadata JSON."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for attr, filename in SCENE_FILES.items():
        write_wav(directory / filename, Waveform(samples=getattr(scene, attr), sample_rate=scene.sample_rate))
    payload = {"config_hash": config_hash, "metadata": scene.metadata.model_dump(mode="json")}
    (directory / METADATA_FILE).write_text(json.dumps(payload, indent=2, sort_keys=True))
    return directory


def read_scene(directory: PathLike) -> AerScene:
    directory = Path(directory)
    meta_path = directory / METADATA_FILE
    if not meta_path.exists():
        raise SceneError(f"No {METADATA_FILE} in {directory}")
    payload = json.loads(meta_path.read_text())
    metadata = SceneMetadata.model_validate(payload["metadata"])
    signals = {
        attr: read_wav(directory / filename, expected_rate=metadata.sample_rate).samples
        for attr, filename in SCENE_FILES.items()
    }
    return AerScene(metadata=metadata, **signals)


def write_manifest(path: PathLike, entries: Iterable[ManifestEntry]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        for entry in entries:
            f.write(entry.model_dump_json() + "\n")
    return path


def read_manifest(path: PathLike) -> list[ManifestEntry]:
    """Entries in file order; relative scene paths resolve against the manifest directory."""
    path = Path(path)
    entries = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        entry = ManifestEntry.model_validate_json(line)
        scene_path = Path(entry.path)
        if not scene_path.is_absolute():
            entry = entry.model_copy(update={"path": str(path.parent / scene_path)})
        entries.append(entry)
    return entries


def manifest_entry(scene: AerScene, path: PathLike, config_hash: str = "") -> ManifestEntry:
    return ManifestEntry(
        id=scene.metadata.scene_id,
        path=str(path),
        subset=scene.subset,
        sir_db=scene.sir_db,
        config_hash=config_hash,
    )
