"""
Signal Core
===========

Waveform container, framing, overlap-add, convolution and WAV I/O.
"""

from .waveform import (
    DEFAULT_FRAME_LEN,
    DEFAULT_HOP,
    FrameMatrix,
    Waveform,
    convolve,
    frame,
    frame_indices,
    mean_power,
    num_frames,
    overlap_add,
    padded_length,
    power_db,
)
from .wavio import read_wav, write_wav

__all__ = [
    "DEFAULT_FRAME_LEN",
    "DEFAULT_HOP",
    "FrameMatrix",
    "Waveform",
    "convolve",
    "frame",
    "frame_indices",
    "mean_power",
    "num_frames",
    "overlap_add",
    "padded_length",
    "power_db",
    "read_wav",
    "write_wav",
]
