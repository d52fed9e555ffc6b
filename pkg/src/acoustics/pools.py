"""
Geometry Pools
==============

Disjoint room, T60 and distance pools for training, validation and test
scenes, and seeded sampling of microphone and source placements.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import GeometryError
from .room import Position, RirRequest, RoomSpec

Split = Literal["train", "validation", "test"]
SPLITS: tuple[Split, ...] = ("train", "validation", "test")

MIC_CLEARANCE = 0.5
SOURCE_CLEARANCE = 0.3
PLACEMENT_ATTEMPTS = 100


@dataclass(frozen=True)
class GeometryPool:
    """Candidate rooms (W, L, H), T60 values and source distances."""

    rooms: tuple[tuple[float, float, float], ...]
    t60s: tuple[float, ...]
    distances: tuple[float, ...]


TRAIN_POOL = GeometryPool(
    rooms=((2, 4, 2.7), (6, 6, 2.7), (10, 4, 2.7), (7, 3, 2.7), (8, 10, 2.7)),
    t60s=(0.2, 0.3, 0.4, 0.5),
    distances=(0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9),
)

VALIDATION_POOL = GeometryPool(
    rooms=((5, 6, 2.7), (4, 3, 2.7), (8, 9, 2.7)),
    t60s=(0.23, 0.33, 0.43, 0.53),
    distances=(0.55, 1.05, 1.55, 2.05),
)

TEST_POOL = GeometryPool(
    rooms=((3, 5, 3), (4, 6, 3), (9, 9, 3)),
    t60s=(0.25, 0.35, 0.45),
    distances=(0.85, 1.35, 1.85),
)

POOLS: dict[Split, GeometryPool] = {
    "train": TRAIN_POOL,
    "validation": VALIDATION_POOL,
    "test": TEST_POOL,
}


@dataclass(frozen=True)
class Geometry:
    """One sampled room with microphone, loudspeaker and near-end talker."""

    room: RoomSpec
    t60: float
    mic: Position
    echo_source: Position
    near_source: Position
    echo_distance: float
    near_distance: float

    def echo_request(self, sample_rate: int) -> RirRequest:
        return RirRequest(
            room=self.room, t60=self.t60, source=self.echo_source, mic=self.mic, sample_rate=sample_rate
        )

    def near_request(self, sample_rate: int) -> RirRequest:
        return RirRequest(
            room=self.room, t60=self.t60, source=self.near_source, mic=self.mic, sample_rate=sample_rate
        )


def _as_position(p: np.ndarray) -> Position:
    return (float(p[0]), float(p[1]), float(p[2]))


def sample_mic(room: RoomSpec, rng: np.random.Generator, clearance: float = MIC_CLEARANCE) -> Position:
    """Uniform position at least `clearance` from every wall."""
    dims = room.dims
    if np.any(dims < 2 * clearance):
        raise GeometryError(tuple(dims), 0.0, 0)
    return _as_position(rng.uniform(clearance, dims - clearance))


def place_source(
    room: RoomSpec,
    mic: Position,
    distance: float,
    rng: np.random.Generator,
    clearance: float = SOURCE_CLEARANCE,
    attempts: int = PLACEMENT_ATTEMPTS,
) -> Position:
    """Point at `distance` from the mic in a uniform random direction, clear of the walls."""
    dims = room.dims
    center = np.asarray(mic, dtype=np.float64)
    for _ in range(attempts):
        direction = rng.normal(size=3)
        norm = np.linalg.norm(direction)
        if norm == 0:
            continue
        candidate = center + distance * direction / norm
        if np.all(candidate >= clearance) and np.all(candidate <= dims - clearance):
            return _as_position(candidate)
    raise GeometryError(tuple(dims), distance, attempts)


def sample_geometry(pool: GeometryPool, rng: np.random.Generator) -> Geometry:
    """Draw room, T60 and two independent distances, then place everything."""
    room = RoomSpec.of(pool.rooms[int(rng.integers(len(pool.rooms)))])
    t60 = float(pool.t60s[int(rng.integers(len(pool.t60s)))])
    echo_distance = float(pool.distances[int(rng.integers(len(pool.distances)))])
    near_distance = float(pool.distances[int(rng.integers(len(pool.distances)))])
    mic = sample_mic(room, rng)
    return Geometry(
        room=room,
        t60=t60,
        mic=mic,
        echo_source=place_source(room, mic, echo_distance, rng),
        near_source=place_source(room, mic, near_distance, rng),
        echo_distance=echo_distance,
        near_distance=near_distance,
    )
