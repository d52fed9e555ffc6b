"""
Waveforms and Framing
=====================

Mono waveforms, analysis framing, overlap-add synthesis, linear
convolution and power in decibels.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.signal import fftconvolve

from ..errors import EmptyInputError, InvalidSignalError, SampleRateMismatchError

DEFAULT_FRAME_LEN = 32
DEFAULT_HOP = 16
POWER_FLOOR = 1e-12


@dataclass(frozen=True)
class Waveform:
    """Finite mono signal at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidSignalError("Waveform", f"must be 1-D, got shape {samples.shape}")
        if self.sample_rate <= 0:
            raise InvalidSignalError("Waveform", f"sample rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise InvalidSignalError("Waveform", "contains non-finite samples")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate

    def require_rate(self, sample_rate: int) -> "Waveform":
        """Return self, or raise if recorded at another rate."""
        if self.sample_rate != sample_rate:
            raise SampleRateMismatchError(sample_rate, self.sample_rate)
        return self


@dataclass(frozen=True)
class FrameMatrix:
    """Frames of a signal as columns (frame_len x frame count)."""

    data: np.ndarray
    hop: int
    source_len: int
    sample_rate: int = 0

    @property
    def frame_len(self) -> int:
        return int(self.data.shape[0])

    @property
    def num_frames(self) -> int:
        return int(self.data.shape[1])

    @property
    def padded_len(self) -> int:
        return (self.num_frames - 1) * self.hop + self.frame_len


SignalLike = Union[Waveform, np.ndarray]


def _samples(x: SignalLike) -> np.ndarray:
    if isinstance(x, Waveform):
        return x.samples
    return np.asarray(x, dtype=np.float64)


def padded_length(n: int, frame_len: int = DEFAULT_FRAME_LEN, hop: int = DEFAULT_HOP) -> int:
    """Smallest length >= n covered exactly by whole frames."""
    if n <= frame_len:
        return frame_len
    return frame_len + -(-(n - frame_len) // hop) * hop


def num_frames(n: int, frame_len: int = DEFAULT_FRAME_LEN, hop: int = DEFAULT_HOP) -> int:
    """Frame count produced by `frame` for an n-sample signal."""
    return (padded_length(n, frame_len, hop) - frame_len) // hop + 1


def frame(
    w: SignalLike, frame_len: int = DEFAULT_FRAME_LEN, hop: int = DEFAULT_HOP
) -> FrameMatrix:
    """
    Split a signal into overlapping frames.

    The tail is zero-padded so the last frame is complete. Column t
    holds samples [t*hop, t*hop + frame_len).
    """
    x = _samples(w)
    n = x.shape[0]
    if n == 0:
        raise EmptyInputError("frame")
    if frame_len <= 0 or hop <= 0:
        raise InvalidSignalError("frame", f"frame_len and hop must be positive, got {frame_len}, {hop}")
    if hop > frame_len:
        # gaps between frames would leave samples uncovered
        raise InvalidSignalError("frame", f"hop {hop} exceeds frame_len {frame_len}")

    padded = np.zeros(padded_length(n, frame_len, hop), dtype=np.float64)
    padded[:n] = x
    windows = np.lib.stride_tricks.sliding_window_view(padded, frame_len)[::hop]
    rate = w.sample_rate if isinstance(w, Waveform) else 0
    return FrameMatrix(data=np.ascontiguousarray(windows.T), hop=hop, source_len=n, sample_rate=rate)


def frame_indices(num: int, frame_len: int, hop: int) -> np.ndarray:
    """Sample index of every frame entry, shape (frame_len, num)."""
    return np.arange(frame_len)[:, None] + hop * np.arange(num)[None, :]


def overlap_add(frames: FrameMatrix, normalize: bool = False) -> np.ndarray:
    """
    Sum frames back at their offsets and trim to the source length.

    With normalize=True every sample is divided by the number of frames
    covering it, which inverts `frame` exactly.
    """
    out = np.zeros(frames.padded_len, dtype=np.float64)
    idx = frame_indices(frames.num_frames, frames.frame_len, frames.hop)
    np.add.at(out, idx, frames.data)
    if normalize:
        coverage = np.zeros_like(out)
        np.add.at(coverage, idx, 1.0)
        out /= coverage
    return out[: frames.source_len]


def convolve(a: SignalLike, h: SignalLike) -> np.ndarray:
    """Full linear convolution, length len(a) + len(h) - 1."""
    x = _samples(a)
    k = _samples(h)
    if x.size == 0:
        raise EmptyInputError("convolve")
    if k.size == 0:
        raise EmptyInputError("convolve")
    if isinstance(a, Waveform) and isinstance(h, Waveform):
        h.require_rate(a.sample_rate)
    return np.asarray(fftconvolve(x, k, mode="full"), dtype=np.float64)


def power_db(x: SignalLike) -> float:
    """Mean power in dB with a 1e-12 floor."""
    samples = _samples(x)
    if samples.size == 0:
        raise EmptyInputError("power_db")
    return float(10.0 * np.log10(np.mean(samples**2) + POWER_FLOOR))


def mean_power(x: SignalLike) -> float:
    samples = _samples(x)
    if samples.size == 0:
        raise EmptyInputError("mean_power")
    return float(np.mean(samples**2))
