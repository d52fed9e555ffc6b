"""
Room Acoustics
==============

Image-method RIR simulation, T60 measurement and geometry pools.
"""

from .decay import measured_t60, schroeder_curve
from .export import RirMetadata, read_rir, write_rir
from .pools import (
    POOLS,
    SPLITS,
    TEST_POOL,
    TRAIN_POOL,
    VALIDATION_POOL,
    Geometry,
    GeometryPool,
    Split,
    place_source,
    sample_geometry,
    sample_mic,
)
from .room import (
    SPEED_OF_SOUND,
    Rir,
    RirRequest,
    RoomSpec,
    default_max_order,
    direct_path,
    reflection_coefficient,
    simulate_rir,
)

__all__ = [
    "POOLS",
    "SPEED_OF_SOUND",
    "SPLITS",
    "TEST_POOL",
    "TRAIN_POOL",
    "VALIDATION_POOL",
    "Geometry",
    "GeometryPool",
    "Rir",
    "RirMetadata",
    "RirRequest",
    "RoomSpec",
    "Split",
    "default_max_order",
    "direct_path",
    "measured_t60",
    "place_source",
    "read_rir",
    "reflection_coefficient",
    "sample_geometry",
    "sample_mic",
    "schroeder_curve",
    "simulate_rir",
    "write_rir",
]
