"""
Echo Return Loss Enhancement
============================

Frame-wise ERLE between the true echo and the echo residual.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .objectives import DB_CAP, EPS, ArrayLike, _pair

# 128 ms frames with 75% overlap at 16 kHz.
ERLE_FRAME = 2048
ERLE_HOP = 512


@dataclass(frozen=True)
class ErleSeries:
    """ERLE per frame with frame-centre times in seconds."""

    times: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def mean(self) -> float:
        return float(np.mean(self.values)) if len(self) else float("nan")


def erle_frame_params(sample_rate: int) -> tuple[int, int]:
    """Frame and hop scaled from the 16 kHz values."""
    scale = sample_rate / 16000
    return max(1, round(ERLE_FRAME * scale)), max(1, round(ERLE_HOP * scale))


def erle_curve(
    echo: ArrayLike,
    echo_estimate: ArrayLike,
    sample_rate: int = 16000,
    frame_len: int | None = None,
    hop: int | None = None,
) -> ErleSeries:
    """
    10 log10((|x0|^2 + eps) / (|x0 - x0_hat|^2 + eps)) per frame, capped at 80 dB.

    Frames are not padded; a signal shorter than one frame gives a single
    frame over all samples.
    """
    est, ref = _pair("erle", echo_estimate, echo)
    default_len, default_hop = erle_frame_params(sample_rate)
    frame_len = frame_len or default_len
    hop = hop or default_hop

    n = ref.size
    if n < frame_len:
        starts = np.array([0])
        frame_len = n
    else:
        starts = np.arange((n - frame_len) // hop + 1) * hop
    taps = starts[:, None] + np.arange(frame_len)[None, :]
    echo_energy = np.sum(ref[taps] ** 2, axis=1)
    residual_energy = np.sum((ref - est)[taps] ** 2, axis=1)
    values = np.clip(10.0 * np.log10((echo_energy + EPS) / (residual_energy + EPS)), -DB_CAP, DB_CAP)
    times = (starts + frame_len / 2.0) / sample_rate
    return ErleSeries(times=times, values=values)


def write_erle_csv(path: Union[str, Path], series: ErleSeries) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "erle_db"])
        for t, v in zip(series.times, series.values):
            writer.writerow([f"{t:.6f}", f"{v:.6f}"])
    return path
