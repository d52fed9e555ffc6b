"""
Shoebox Room Simulation
=======================

Image-source room impulse responses for rectangular rooms with one
reflection coefficient on all six walls, derived from a target T60 with
Sabine's formula. Each image contributes beta^k / (4 pi d) at a fractional
delay d * fs / c rendered with a Hann-windowed sinc of +-8 samples.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import PositionOutsideRoomError, UnachievableT60Error
from ..observability import get_logger

logger = get_logger(__name__)

SPEED_OF_SOUND = 343.0
SABINE_CONSTANT = 0.161
SINC_HALF_WIDTH = 8
MIN_TAIL_SAMPLES = 64

Position = tuple[float, float, float]


class RoomSpec(BaseModel):
    """Rectangular room dimensions in metres."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    width: float = Field(..., gt=0)
    length: float = Field(..., gt=0)
    height: float = Field(..., gt=0)

    @classmethod
    def of(cls, dims: tuple[float, float, float]) -> "RoomSpec":
        return cls(width=dims[0], length=dims[1], height=dims[2])

    @property
    def dims(self) -> np.ndarray:
        return np.array([self.width, self.length, self.height], dtype=np.float64)

    @property
    def volume(self) -> float:
        return self.width * self.length * self.height

    @property
    def surface(self) -> float:
        w, d, h = self.width, self.length, self.height
        return 2.0 * (w * d + w * h + d * h)

    def contains(self, position: Position) -> bool:
        p = np.asarray(position, dtype=np.float64)
        return bool(np.all(p > 0) and np.all(p < self.dims))


class RirRequest(BaseModel):
    """Everything needed to simulate one room impulse response."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    room: RoomSpec
    t60: float = Field(..., ge=0, description="Target reverberation time; 0 is anechoic")
    source: Position
    mic: Position
    sample_rate: int = Field(default=16000, gt=0)
    speed_of_sound: float = Field(default=SPEED_OF_SOUND, gt=0)

    @property
    def distance(self) -> float:
        return float(np.linalg.norm(np.subtract(self.source, self.mic)))

    def validate_positions(self) -> None:
        for what, pos in (("source", self.source), ("mic", self.mic)):
            if not self.room.contains(pos):
                raise PositionOutsideRoomError(what, pos, tuple(self.room.dims))


@dataclass(frozen=True)
class Rir:
    """Simulated impulse response and the request that produced it."""

    taps: np.ndarray
    sample_rate: int
    request: RirRequest
    max_order: int

    def __len__(self) -> int:
        return int(self.taps.shape[0])


# ============================================================
# ABSORPTION
# ============================================================


def reflection_coefficient(room: RoomSpec, t60: float) -> float:
    """beta = sqrt(1 - alpha) with Sabine's alpha = 0.161 V / (S T60)."""
    if t60 <= 0:
        raise ValueError(f"T60 must be positive for a reverberant room, got {t60}")
    alpha = SABINE_CONSTANT * room.volume / (room.surface * t60)
    if alpha >= 1.0:
        raise UnachievableT60Error(t60, alpha)
    return math.sqrt(1.0 - alpha)


def default_max_order(room: RoomSpec, t60: float, speed_of_sound: float = SPEED_OF_SOUND) -> int:
    """Image order per axis covering a T60-long response."""
    if t60 <= 0:
        return 0
    return math.ceil(speed_of_sound * t60 / (2.0 * float(np.min(room.dims)))) + 1


def rir_length(request: RirRequest) -> int:
    direct = request.distance * request.sample_rate / request.speed_of_sound
    return max(math.ceil(request.t60 * request.sample_rate), math.ceil(direct) + MIN_TAIL_SAMPLES)


# ============================================================
# IMAGE SOURCES
# ============================================================


def _add_pulses(taps: np.ndarray, delays: np.ndarray, gains: np.ndarray) -> None:
    """Add Hann-windowed sinc pulses at fractional sample delays."""
    offsets = np.arange(-SINC_HALF_WIDTH + 1, SINC_HALF_WIDTH + 1)
    idx = np.floor(delays).astype(np.int64)[:, None] + offsets[None, :]
    t = idx - delays[:, None]
    window = 0.5 * (1.0 + np.cos(np.pi * t / SINC_HALF_WIDTH))
    values = gains[:, None] * np.sinc(t) * window
    valid = (idx >= 0) & (idx < taps.shape[0])
    taps += np.bincount(idx[valid], weights=values[valid], minlength=taps.shape[0])


def _images_for_x(
    nx: int,
    y_orders: np.ndarray,
    z_orders: np.ndarray,
    request: RirRequest,
    beta: float,
    length: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Delays and gains of every image with x-index nx."""
    src = np.asarray(request.source, dtype=np.float64)
    mic = np.asarray(request.mic, dtype=np.float64)
    dims = request.room.dims
    ny, nz, px, py, pz = (
        a.reshape(-1) for a in np.meshgrid(y_orders, z_orders, [0, 1], [0, 1], [0, 1], indexing="ij")
    )
    nxs = np.full_like(ny, nx)
    x = (1 - 2 * px) * src[0] + 2 * nxs * dims[0] - mic[0]
    y = (1 - 2 * py) * src[1] + 2 * ny * dims[1] - mic[1]
    z = (1 - 2 * pz) * src[2] + 2 * nz * dims[2] - mic[2]
    dist = np.sqrt(x * x + y * y + z * z)
    bounces = (
        np.abs(nxs - px) + np.abs(nxs) + np.abs(ny - py) + np.abs(ny) + np.abs(nz - pz) + np.abs(nz)
    )
    gains = np.power(beta, bounces) / (4.0 * np.pi * dist)
    delays = dist * request.sample_rate / request.speed_of_sound
    keep = (delays < length + SINC_HALF_WIDTH) & (gains != 0)
    return delays[keep], gains[keep]


def _axis_orders(request: RirRequest, order: int, length: int) -> list[np.ndarray]:
    """Per-axis image indices, limited to those that can arrive within `length`."""
    reach = (length + SINC_HALF_WIDTH) * request.speed_of_sound / request.sample_rate
    limits = [min(order, math.ceil(reach / (2.0 * dim)) + 1) for dim in request.room.dims]
    return [np.arange(-n, n + 1) for n in limits]


def simulate_rir(request: RirRequest, max_order: Optional[int] = None) -> Rir:
    """
    Image-method impulse response.

    T60 = 0 gives the free-field response (direct path only). Images
    arriving after the response length are dropped.
    """
    request.validate_positions()
    if request.t60 == 0:
        beta, order = 0.0, 0
    else:
        beta = reflection_coefficient(request.room, request.t60)
        order = default_max_order(request.room, request.t60, request.speed_of_sound)
    if max_order is not None:
        order = max_order
    if order < 0:
        raise ValueError(f"max_order must be non-negative, got {order}")

    length = rir_length(request)
    taps = np.zeros(length, dtype=np.float64)
    x_orders, y_orders, z_orders = _axis_orders(request, order, length)
    for nx in x_orders:
        delays, gains = _images_for_x(int(nx), y_orders, z_orders, request, beta, length)
        if delays.size:
            _add_pulses(taps, delays, gains)

    logger.debug(
        "Simulated RIR", t60=request.t60, max_order=order, length=length, beta=round(beta, 5)
    )
    return Rir(taps=taps, sample_rate=request.sample_rate, request=request, max_order=order)


def direct_path(rir: Rir) -> tuple[float, float]:
    """
    (delay in samples, amplitude) of the strongest pulse.

    The delay is the tap-weighted centroid and the amplitude the tap sum
    within the pulse support, which recover the fractional delay and the
    1/(4 pi d) gain of an isolated windowed-sinc pulse.
    """
    taps = rir.taps
    peak = int(np.argmax(np.abs(taps)))
    lo = max(0, peak - SINC_HALF_WIDTH - 1)
    hi = min(taps.shape[0], peak + SINC_HALF_WIDTH + 2)
    segment = taps[lo:hi]
    amplitude = float(segment.sum())
    delay = float(np.dot(np.arange(lo, hi), segment) / amplitude)
    return delay, amplitude
