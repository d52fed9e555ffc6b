"""
Scene Mixing
============

Combines a far-end signal and a near-end source into one acoustic echo
reduction scene: echo x0 = a0 * h_echo, near-end x1 = g (s * h_near) with
g chosen so that 10 log10(P(x0) / P(x1)) equals the requested SIR, and
mixture y = x0 + x1.
"""

from dataclasses import dataclass
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..acoustics import Rir
from ..dsp import Waveform, convolve, mean_power
from ..errors import DegenerateSourceError, InvalidSirError
from ..observability import get_logger

logger = get_logger(__name__)

SubsetTag = Literal["SS", "SN", "NS", "NN"]
SUBSET_TAGS: tuple[SubsetTag, ...] = ("SS", "SN", "NS", "NN")

POWER_FLOOR = 1e-10

Signal = Union[np.ndarray, Waveform]
Impulse = Union[np.ndarray, Rir]


class SceneMetadata(BaseModel):
    """Provenance of one scene."""

    model_config = ConfigDict(extra="forbid")

    scene_id: str = ""
    split: str = ""
    subset: SubsetTag
    sir_db: float
    sample_rate: int = Field(..., gt=0)
    far_end_source: str = ""
    near_end_source: str = ""
    room: Optional[tuple[float, float, float]] = None
    t60: Optional[float] = None
    mic: Optional[tuple[float, float, float]] = None
    echo_position: Optional[tuple[float, float, float]] = None
    near_position: Optional[tuple[float, float, float]] = None
    echo_distance: Optional[float] = None
    near_distance: Optional[float] = None
    seed: Optional[int] = None
    index: Optional[int] = None
    switch_sample: Optional[int] = Field(
        default=None, description="First sample of the second far-end speaker"
    )


@dataclass
class AerScene:
    """Mixture, its two components and the far-end reference."""

    mixture: np.ndarray
    echo: np.ndarray
    near_end: np.ndarray
    reference: np.ndarray
    metadata: SceneMetadata

    @property
    def sample_rate(self) -> int:
        return self.metadata.sample_rate

    @property
    def subset(self) -> SubsetTag:
        return self.metadata.subset

    @property
    def sir_db(self) -> float:
        return self.metadata.sir_db

    def __len__(self) -> int:
        return int(self.mixture.shape[0])


def _samples(x: Signal) -> np.ndarray:
    return x.samples if isinstance(x, Waveform) else np.asarray(x, dtype=np.float64)


def _taps(h: Impulse) -> np.ndarray:
    return h.taps if isinstance(h, Rir) else np.asarray(h, dtype=np.float64)


def assemble_scene(
    reference: np.ndarray,
    echo: np.ndarray,
    near_raw: np.ndarray,
    sir_db: float,
    subset: SubsetTag,
    sample_rate: int,
    **metadata: Any,
) -> AerScene:
    """Scale the near-end component to the target SIR and mix."""
    if not np.isfinite(sir_db):
        raise InvalidSirError(sir_db)
    echo_power = mean_power(echo)
    if echo_power < POWER_FLOOR:
        raise DegenerateSourceError("echo", echo_power)
    near_power = mean_power(near_raw)
    if near_power < POWER_FLOOR:
        raise DegenerateSourceError("near-end", near_power)

    gain = np.sqrt(echo_power / (near_power * 10.0 ** (sir_db / 10.0)))
    near_end = gain * near_raw
    meta = SceneMetadata(subset=subset, sir_db=sir_db, sample_rate=sample_rate, **metadata)
    return AerScene(
        mixture=echo + near_end,
        echo=echo,
        near_end=near_end,
        reference=reference,
        metadata=meta,
    )


def mix_scene(
    far_end: Signal,
    near_source: Signal,
    echo_rir: Impulse,
    near_rir: Impulse,
    sir_db: float,
    subset: SubsetTag,
    sample_rate: int = 16000,
    **metadata: Any,
) -> AerScene:
    """
    Build one scene; all outputs have the far-end length.

    The near-end source must be at least as long as the far-end signal.
    """
    reference = _samples(far_end)
    near = _samples(near_source)
    n = reference.shape[0]
    if near.shape[0] < n:
        raise ValueError(f"Near-end source has {near.shape[0]} samples, need {n}")
    echo = convolve(reference, _taps(echo_rir))[:n]
    near_raw = convolve(near[:n], _taps(near_rir))[:n]
    return assemble_scene(reference, echo, near_raw, sir_db, subset, sample_rate, **metadata)


def build_switch_scenario(
    speaker_a: Signal,
    speaker_b: Signal,
    rir_a: Impulse,
    rir_b: Impulse,
    near_source: Signal,
    near_rir: Impulse,
    sir_db: float = 0.0,
    sample_rate: int = 16000,
    segment_seconds: float = 2.0,
    **metadata: Any,
) -> AerScene:
    """
    Far-end speaker switch: A for one segment, then B from a different position.

    Each segment's echo is convolved separately and truncated to the segment,
    so the echo path changes abruptly at the switch.
    """
    half = int(round(segment_seconds * sample_rate))
    a, b, near = _samples(speaker_a), _samples(speaker_b), _samples(near_source)
    for name, signal, need in (("speaker_a", a, half), ("speaker_b", b, half), ("near", near, 2 * half)):
        if signal.shape[0] < need:
            raise ValueError(f"{name} has {signal.shape[0]} samples, need {need}")

    a, b = a[:half], b[:half]
    reference = np.concatenate([a, b])
    echo = np.concatenate([convolve(a, _taps(rir_a))[:half], convolve(b, _taps(rir_b))[:half]])
    near_raw = convolve(near[: 2 * half], _taps(near_rir))[: 2 * half]
    logger.debug("Built speaker switch scene", switch_sample=half, sir_db=sir_db)
    return assemble_scene(
        reference, echo, near_raw, sir_db, "SS", sample_rate, switch_sample=half, **metadata
    )
