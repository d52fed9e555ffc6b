"""
Reverberation Time Measurement
==============================

Schroeder backward integration and a line fit of the -5 to -25 dB
decay range, extrapolated to 60 dB.
"""

import numpy as np

from ..errors import InsufficientDecayError
from .room import Rir

FIT_START_DB = -5.0
FIT_STOP_DB = -25.0
MIN_FIT_SAMPLES = 3


def schroeder_curve(taps: np.ndarray) -> np.ndarray:
    """Energy decay curve in dB relative to total energy."""
    energy = np.asarray(taps, dtype=np.float64) ** 2
    edc = np.cumsum(energy[::-1])[::-1]
    if edc.size == 0 or edc[0] <= 0:
        raise InsufficientDecayError(0.0)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(edc / edc[0])


def measured_t60(rir: Rir, start_db: float = FIT_START_DB, stop_db: float = FIT_STOP_DB) -> float:
    """T60 from the slope of the Schroeder curve between start_db and stop_db."""
    curve = schroeder_curve(rir.taps)
    finite = curve[np.isfinite(curve)]
    lowest = float(finite.min()) if finite.size else 0.0

    below_start = np.nonzero(curve <= start_db)[0]
    below_stop = np.nonzero(curve <= stop_db)[0]
    if below_start.size == 0 or below_stop.size == 0:
        raise InsufficientDecayError(lowest)
    first, last = int(below_start[0]), int(below_stop[0])

    span = np.arange(first, last + 1)
    span = span[np.isfinite(curve[span])]
    if span.size < MIN_FIT_SAMPLES:
        raise InsufficientDecayError(lowest)

    slope, _ = np.polyfit(span / rir.sample_rate, curve[span], 1)
    if slope >= 0:
        raise InsufficientDecayError(lowest)
    return float(-60.0 / slope)
