"""
Scene Sampling
==============

Random scenes from a source bank and a geometry pool, and seeded scene
streams for training, validation and test. Every scene's RNG is keyed by
(split, seed, index), so streams do not depend on worker scheduling.
"""

import threading
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..acoustics import POOLS, Geometry, GeometryPool, Rir, Split, sample_geometry, simulate_rir
from ..errors import GeometryError
from ..observability import get_logger
from .mixing import SUBSET_TAGS, AerScene, SubsetTag, mix_scene
from .sources import SourceBank

logger = get_logger(__name__)

SPLIT_CODES: dict[str, int] = {"train": 0, "validation": 1, "test": 2}


class SceneSettings(BaseModel):
    """Scene duration, SIR range and the fixed seeds of held-out streams."""

    model_config = ConfigDict(extra="forbid")

    sample_rate: int = Field(default=16000, gt=0)
    scene_seconds: float = Field(default=4.0, gt=0)
    sir_min_db: float = -5.0
    sir_max_db: float = 5.0
    max_geometry_draws: int = Field(default=10, ge=1)
    validation_seed: int = 1234
    test_seed: int = 4321
    geometry_bank_size: Optional[int] = Field(
        default=None, ge=1, description="Draw geometries from this many pre-simulated rooms per split"
    )
    geometry_bank_seed: int = 0

    @property
    def scene_samples(self) -> int:
        return int(round(self.scene_seconds * self.sample_rate))

    def stream_seed(self, split: Split, epoch_seed: int) -> int:
        if split == "validation":
            return self.validation_seed
        if split == "test":
            return self.test_seed
        return epoch_seed


def scene_rng(split: Split, seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([SPLIT_CODES[split], seed, index])


# ============================================================
# GEOMETRY
# ============================================================


def draw_geometry(pool: GeometryPool, rng: np.random.Generator, max_draws: int = 10) -> Geometry:
    """sample_geometry with redraws when no placement fits the room."""
    for attempt in range(1, max_draws):
        try:
            return sample_geometry(pool, rng)
        except GeometryError as e:
            logger.warning("Geometry draw failed; redrawing", attempt=attempt, error=str(e))
    return sample_geometry(pool, rng)


class GeometryBank:
    """
    A fixed set of geometries with lazily simulated RIRs.

    Entry i is drawn from its own RNG, so the bank is identical however it
    is filled. Simulations run outside the lock so threads fill different
    entries in parallel; when two threads race on one entry the first
    stored result is kept and returned to both.
    """

    def __init__(self, pool: GeometryPool, size: int, seed: int, sample_rate: int, max_draws: int = 10):
        self.pool = pool
        self.size = size
        self.seed = seed
        self.sample_rate = sample_rate
        self.max_draws = max_draws
        self._entries: dict[int, tuple[Geometry, Rir, Rir]] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return self.size

    def _simulate(self, index: int) -> tuple[Geometry, Rir, Rir]:
        rng = np.random.default_rng([self.seed, index])
        geometry = draw_geometry(self.pool, rng, self.max_draws)
        return (
            geometry,
            simulate_rir(geometry.echo_request(self.sample_rate)),
            simulate_rir(geometry.near_request(self.sample_rate)),
        )

    def get(self, index: int) -> tuple[Geometry, Rir, Rir]:
        with self._lock:
            entry = self._entries.get(index)
        if entry is not None:
            return entry
        entry = self._simulate(index)
        with self._lock:
            return self._entries.setdefault(index, entry)


@lru_cache(maxsize=8)
def shared_geometry_bank(
    split: Split, size: int, seed: int, sample_rate: int, max_draws: int = 10
) -> GeometryBank:
    """Geometry bank of a split's pool, shared by every stream with the same key."""
    return GeometryBank(POOLS[split], size, seed, sample_rate, max_draws)


# ============================================================
# SCENES
# ============================================================


def _subset_kinds(tag: SubsetTag) -> tuple[str, str]:
    kinds = {"S": "speech", "N": "non-speech"}
    return kinds[tag[0]], kinds[tag[1]]


def sample_scene(
    bank: SourceBank,
    pool: GeometryPool,
    rng: np.random.Generator,
    settings: Optional[SceneSettings] = None,
    subset: Optional[SubsetTag] = None,
    geometry_bank: Optional[GeometryBank] = None,
    **metadata: object,
) -> AerScene:
    """
    One random scene: subset tag, sources, geometry and SIR.

    The first letter of the tag is the far-end (echo) class, the second the
    near-end class. A forced `subset` replaces the drawn tag.
    """
    settings = settings or SceneSettings(sample_rate=bank.sample_rate)
    n = settings.scene_samples

    tag = SUBSET_TAGS[int(rng.integers(len(SUBSET_TAGS)))]
    tag = subset or tag
    far_kind, near_kind = _subset_kinds(tag)
    far_entry, far_end = bank.draw(far_kind, rng, n)  # type: ignore[arg-type]
    near_entry, near_src = bank.draw(near_kind, rng, n, exclude=far_entry.name)  # type: ignore[arg-type]

    if geometry_bank is not None:
        geometry, echo_rir, near_rir = geometry_bank.get(int(rng.integers(len(geometry_bank))))
    else:
        geometry = draw_geometry(pool, rng, settings.max_geometry_draws)
        echo_rir = simulate_rir(geometry.echo_request(settings.sample_rate))
        near_rir = simulate_rir(geometry.near_request(settings.sample_rate))

    sir_db = float(rng.uniform(settings.sir_min_db, settings.sir_max_db))
    return mix_scene(
        far_end,
        near_src,
        echo_rir,
        near_rir,
        sir_db,
        tag,
        settings.sample_rate,
        far_end_source=far_entry.name,
        near_end_source=near_entry.name,
        room=tuple(float(d) for d in geometry.room.dims),
        t60=geometry.t60,
        mic=geometry.mic,
        echo_position=geometry.echo_source,
        near_position=geometry.near_source,
        echo_distance=geometry.echo_distance,
        near_distance=geometry.near_distance,
        **metadata,
    )


def dataset_iter(
    split: Split,
    epoch_seed: int,
    count: int,
    bank: SourceBank,
    settings: Optional[SceneSettings] = None,
    subset: Optional[SubsetTag] = None,
    workers: int = 1,
    pool: Optional[GeometryPool] = None,
) -> Iterator[AerScene]:
    """
    Yield `count` scenes in index order.

    Training streams are keyed by `epoch_seed`; validation and test streams
    use the fixed seeds in `settings` and repeat across epochs.
    """
    if count <= 0:
        raise ValueError(f"count must be positive, got {count}")
    settings = settings or SceneSettings(sample_rate=bank.sample_rate)
    seed = settings.stream_seed(split, epoch_seed)
    geometry_bank: Optional[GeometryBank] = None
    if settings.geometry_bank_size:
        size, rate, draws = settings.geometry_bank_size, settings.sample_rate, settings.max_geometry_draws
        geometry_bank = (
            GeometryBank(pool, size, settings.geometry_bank_seed, rate, draws)
            if pool is not None
            else shared_geometry_bank(split, size, settings.geometry_bank_seed, rate, draws)
        )
    pool = pool or POOLS[split]

    def build(index: int) -> AerScene:
        return sample_scene(
            bank,
            pool,
            scene_rng(split, seed, index),
            settings,
            subset=subset,
            geometry_bank=geometry_bank,
            scene_id=f"{split}-{seed}-{index:06d}",
            split=split,
            seed=seed,
            index=index,
        )

    logger.debug("Scene stream", split=split, seed=seed, count=count, workers=workers)
    if workers <= 1:
        for index in range(count):
            yield build(index)
        return

    block = 4 * workers
    with ThreadPoolExecutor(max_workers=workers) as executor:
        for start in range(0, count, block):
            yield from executor.map(build, range(start, min(start + block, count)))
