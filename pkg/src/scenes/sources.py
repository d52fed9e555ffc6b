"""
Source Material
===============

Deterministic synthetic sources and the source bank scenes draw from.
The bank holds a speech class and five non-speech classes (acoustic
guitar, bass guitar, piano, rain, engine), either synthesized or read
from a `<label>/*.wav` directory tree.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from scipy.signal import butter, chirp, sosfilt

from ..acoustics import Split
from ..dsp import Waveform, read_wav
from ..errors import DegenerateSourceError, SourceBankError
from ..observability import get_logger

logger = get_logger(__name__)

SynthKind = Literal["tone_stack", "filtered_noise", "chirp", "am_noise"]
SourceKind = Literal["speech", "non-speech"]

SPEECH_LABEL = "speech"
NON_SPEECH_CLASSES = ("acoustic_guitar", "bass_guitar", "piano", "rain", "engine")
LABELS = (SPEECH_LABEL, *NON_SPEECH_CLASSES)

VALIDATION_FRACTION = 0.3
SPLIT_SEED_OFFSETS: dict[str, int] = {"train": 0, "validation": 1_000_000, "test": 2_000_000}


# ============================================================
# SYNTHESIS
# ============================================================


def _unit_rms(x: np.ndarray, kind: str) -> np.ndarray:
    rms = float(np.sqrt(np.mean(x**2))) if x.size else 0.0
    if rms < 1e-12:
        raise DegenerateSourceError(kind, rms**2)
    return x / rms


def _bandpass(x: np.ndarray, low: float, high: float, sample_rate: int) -> np.ndarray:
    high = min(high, 0.45 * sample_rate)
    sos = butter(4, [low, high], btype="bandpass", fs=sample_rate, output="sos")
    return np.asarray(sosfilt(sos, x))


def _tone_stack(
    rng: np.random.Generator, t: np.ndarray, seconds: float, sample_rate: int, params: dict[str, float]
) -> np.ndarray:
    f0 = params.get("f0", rng.uniform(100.0, 400.0))
    # Snap to the DFT grid of the full signal so each harmonic occupies one bin.
    base_bin = max(1, round(f0 * seconds))
    max_harmonic = max(3, int((0.45 * sample_rate) // (base_bin / seconds)))
    harmonics = rng.choice(np.arange(1, min(6, max_harmonic) + 1), size=3, replace=False)
    x = np.zeros_like(t)
    for k in harmonics:
        freq = k * base_bin / seconds
        x += rng.uniform(0.3, 1.0) * np.sin(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
    decay = params.get("decay", 0.0)
    if decay > 0:
        note = params.get("note_seconds", 0.5)
        x *= np.exp(-decay * np.mod(t, note))
    return x


def _am_noise(
    rng: np.random.Generator, t: np.ndarray, sample_rate: int, params: dict[str, float]
) -> np.ndarray:
    noise = _bandpass(rng.normal(size=t.size), 300.0, 3400.0, sample_rate)
    rate = params.get("modulation_hz", rng.uniform(2.0, 8.0))
    envelope = (0.5 * (1.0 + np.sin(2 * np.pi * rate * t + rng.uniform(0, 2 * np.pi)))) ** 2
    return noise * envelope


def synth_source(
    kind: SynthKind,
    seed: int,
    seconds: float,
    sample_rate: int = 16000,
    **params: float,
) -> Waveform:
    """
    Deterministic unit-RMS source of the given kind.

    tone_stack: three harmonics of f0 on the DFT grid (optional decay).
    filtered_noise: band-passed white noise.
    chirp: logarithmic sweep from f0 to f1.
    am_noise: speech-band noise amplitude-modulated at 2-8 Hz.
    """
    rng = np.random.default_rng(seed)
    n = int(round(seconds * sample_rate))
    if n <= 0:
        raise ValueError(f"Source duration must be positive, got {seconds}")
    t = np.arange(n) / sample_rate

    if kind == "tone_stack":
        x = _tone_stack(rng, t, n / sample_rate, sample_rate, params)
    elif kind == "filtered_noise":
        low = params.get("low", rng.uniform(200.0, 1000.0))
        high = params.get("high", rng.uniform(2000.0, 0.45 * sample_rate))
        x = _bandpass(rng.normal(size=n), low, max(high, 1.5 * low), sample_rate)
    elif kind == "chirp":
        f0 = params.get("f0", rng.uniform(50.0, 200.0))
        f1 = params.get("f1", rng.uniform(400.0, 0.4 * sample_rate))
        x = chirp(t, f0=f0, t1=t[-1] if n > 1 else 1.0, f1=f1, method="logarithmic")
    elif kind == "am_noise":
        x = _am_noise(rng, t, sample_rate, params)
    else:
        raise ValueError(f"Unknown source kind {kind!r}")
    return Waveform(samples=_unit_rms(np.asarray(x, dtype=np.float64), kind), sample_rate=sample_rate)


# Synthesis recipe per bank label: kind and fixed parameter ranges.
CLASS_RECIPES: dict[str, tuple[SynthKind, dict[str, tuple[float, float]]]] = {
    SPEECH_LABEL: ("am_noise", {}),
    "acoustic_guitar": ("tone_stack", {"f0": (196.0, 392.0), "decay": (1.0, 2.5)}),
    "bass_guitar": ("tone_stack", {"f0": (41.0, 98.0), "decay": (0.5, 1.2)}),
    "piano": ("tone_stack", {"f0": (110.0, 523.0), "decay": (0.8, 2.0)}),
    "rain": ("filtered_noise", {"low": (800.0, 2000.0)}),
    "engine": ("chirp", {"f0": (30.0, 60.0), "f1": (80.0, 200.0)}),
}


# ============================================================
# SOURCE BANK
# ============================================================


@dataclass(frozen=True)
class SourceEntry:
    """One source recording with its class label."""

    name: str
    label: str
    waveform: Waveform

    @property
    def kind(self) -> SourceKind:
        return "speech" if self.label == SPEECH_LABEL else "non-speech"


class SourceBank:
    """Labelled source material for one split."""

    def __init__(self, entries: list[SourceEntry], sample_rate: int) -> None:
        for entry in entries:
            entry.waveform.require_rate(sample_rate)
        self.entries = entries
        self.sample_rate = sample_rate
        self._by_kind: dict[str, list[SourceEntry]] = {"speech": [], "non-speech": []}
        for entry in entries:
            self._by_kind[entry.kind].append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def by_kind(self, kind: SourceKind) -> list[SourceEntry]:
        return self._by_kind[kind]

    def draw(
        self,
        kind: SourceKind,
        rng: np.random.Generator,
        samples: int,
        exclude: Optional[str] = None,
    ) -> tuple[SourceEntry, np.ndarray]:
        """Random entry of `kind` and a random crop of `samples` (tiled if short)."""
        candidates = [e for e in self._by_kind[kind] if e.name != exclude] or self._by_kind[kind]
        if not candidates:
            raise SourceBankError(f"Source bank has no {kind} entries")
        entry = candidates[int(rng.integers(len(candidates)))]
        data = entry.waveform.samples
        if data.size < samples:
            data = np.tile(data, -(-samples // data.size))
        start = int(rng.integers(data.size - samples + 1))
        return entry, data[start : start + samples].copy()

    @classmethod
    def synthetic(
        cls,
        split: Split,
        sample_rate: int = 16000,
        seconds: float = 6.0,
        per_class: int = 8,
        seed: int = 0,
    ) -> "SourceBank":
        """Synthesized bank; each split uses its own seed range."""
        entries: list[SourceEntry] = []
        base = SPLIT_SEED_OFFSETS[split] + seed * 10_000
        for class_index, label in enumerate(LABELS):
            kind, ranges = CLASS_RECIPES[label]
            for j in range(per_class):
                source_seed = base + class_index * 1_000 + j
                rng = np.random.default_rng(source_seed)
                params = {name: float(rng.uniform(lo, hi)) for name, (lo, hi) in ranges.items()}
                waveform = synth_source(kind, source_seed, seconds, sample_rate, **params)
                entries.append(SourceEntry(name=f"{label}_{source_seed}", label=label, waveform=waveform))
        logger.debug("Synthesized source bank", split=split, entries=len(entries))
        return cls(entries, sample_rate)

    @classmethod
    def from_directory(
        cls, root: Union[str, Path], split: Split, sample_rate: int = 16000, seed: int = 0
    ) -> "SourceBank":
        """
        Read `<root>/<split>/<label>/*.wav`, or `<root>/<label>/*.wav`.

        Without a per-split directory, 30% of each label's files are held
        out for validation and the rest used for training.
        """
        root = Path(root)
        split_dir = root / split
        partition = not split_dir.is_dir()
        if partition and split == "test":
            raise SourceBankError(f"No test sources under {split_dir}")
        base = root if partition else split_dir

        entries: list[SourceEntry] = []
        for label in LABELS:
            files = sorted((base / label).glob("*.wav"))
            if partition and files:
                order = np.random.default_rng([seed, LABELS.index(label)]).permutation(len(files))
                held_out = int(round(VALIDATION_FRACTION * len(files)))
                chosen = order[:held_out] if split == "validation" else order[held_out:]
                files = [files[i] for i in sorted(chosen)]
            for path in files:
                wav = read_wav(path, expected_rate=sample_rate)
                entries.append(SourceEntry(name=f"{label}/{path.stem}", label=label, waveform=wav))

        if not entries:
            raise SourceBankError(f"No WAV sources found under {base}")
        logger.info("Loaded source bank", root=str(base), split=split, entries=len(entries))
        return cls(entries, sample_rate)
