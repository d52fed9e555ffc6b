"""
RIR Export
==========

Impulse responses as float32 WAV files with a JSON sidecar describing
the simulation request.
"""

from pathlib import Path
from typing import Union

import numpy as np
from pydantic import BaseModel

from ..dsp import Waveform, read_wav, write_wav
from .room import Rir, RirRequest


class RirMetadata(BaseModel):
    """Sidecar contents of an exported RIR."""

    request: RirRequest
    max_order: int
    length: int
    config_hash: str = ""


def sidecar_path(path: Union[str, Path]) -> Path:
    return Path(path).with_suffix(".json")


def write_rir(path: Union[str, Path], rir: Rir, config_hash: str = "") -> Path:
    """Write `<path>` (WAV) and `<path>.json`."""
    path = Path(path)
    write_wav(path, Waveform(samples=rir.taps, sample_rate=rir.sample_rate))
    meta = RirMetadata(request=rir.request, max_order=rir.max_order, length=len(rir), config_hash=config_hash)
    sidecar_path(path).write_text(meta.model_dump_json(indent=2))
    return path


def read_rir(path: Union[str, Path]) -> Rir:
    path = Path(path)
    meta = RirMetadata.model_validate_json(sidecar_path(path).read_text())
    wav = read_wav(path, expected_rate=meta.request.sample_rate)
    return Rir(
        taps=np.asarray(wav.samples, dtype=np.float64),
        sample_rate=wav.sample_rate,
        request=meta.request,
        max_order=meta.max_order,
    )
