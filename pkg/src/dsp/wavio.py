"""
WAV I/O
=======

Mono WAV reading and writing through soundfile.
"""

from pathlib import Path
from typing import Literal, Union

import numpy as np
import soundfile as sf

from ..errors import SampleRateMismatchError, UnsupportedAudioError
from ..observability import get_logger
from .waveform import Waveform

logger = get_logger(__name__)

WavSubtype = Literal["FLOAT", "PCM_16", "PCM_24"]


def read_wav(path: Union[str, Path], expected_rate: int | None = None) -> Waveform:
    """
    Read a mono WAV file as float64 samples.

    Multichannel files and files at a rate other than `expected_rate`
    are rejected.
    """
    path = Path(path)
    try:
        data, rate = sf.read(str(path), dtype="float64", always_2d=True)
    except RuntimeError as e:
        raise UnsupportedAudioError(str(path), str(e)) from e

    if data.shape[1] != 1:
        raise UnsupportedAudioError(str(path), f"{data.shape[1]} channels, expected mono")
    if expected_rate is not None and rate != expected_rate:
        raise SampleRateMismatchError(expected_rate, int(rate))
    return Waveform(samples=data[:, 0], sample_rate=int(rate))


def write_wav(
    path: Union[str, Path], waveform: Waveform, subtype: WavSubtype = "FLOAT"
) -> Path:
    """Write a waveform, creating parent directories as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    samples = waveform.samples
    if subtype != "FLOAT":
        peak = float(np.max(np.abs(samples))) if samples.size else 0.0
        if peak > 1.0:
            logger.warning("Clipping on integer WAV export", path=str(path), peak=peak)
            samples = np.clip(samples, -1.0, 1.0)
    sf.write(str(path), samples.astype(np.float32), waveform.sample_rate, subtype=subtype)
    return path
