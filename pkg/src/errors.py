"""
Echo Extract Exceptions
=======================

Exception hierarchy shared by every package module.
"""

from typing import Sequence


class EchoExtractError(Exception):
    """Base exception for echo extraction operations."""

    pass


# ============================================================
# SIGNALS
# ============================================================


class SignalError(EchoExtractError):
    """Base exception for waveform handling."""

    pass


class EmptyInputError(SignalError):
    """Raised when an operation receives a zero-length signal."""

    def __init__(self, op: str):
        self.op = op
        super().__init__(f"{op}: empty input")


class InvalidSignalError(SignalError, ValueError):
    """Raised for malformed waveforms and framing parameters."""

    def __init__(self, op: str, reason: str):
        self.op = op
        self.reason = reason
        super().__init__(f"{op}: {reason}")


class SampleRateMismatchError(SignalError):
    """Raised when two signals or a file disagree on sample rate."""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Sample rate mismatch: expected {expected} Hz, got {actual} Hz")


class UnsupportedAudioError(SignalError):
    """Raised for audio files this package cannot ingest."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Unsupported audio {path}: {reason}")


class ShapeMismatchError(EchoExtractError):
    """Raised when operand shapes are incompatible."""

    def __init__(self, op: str, shapes: Sequence[tuple[int, ...]]):
        self.op = op
        self.shapes = [tuple(s) for s in shapes]
        rendered = ", ".join(str(s) for s in self.shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


# ============================================================
# ACOUSTICS
# ============================================================


class AcousticsError(EchoExtractError):
    """Base exception for room simulation."""

    pass


class UnachievableT60Error(AcousticsError):
    """Raised when Sabine's formula needs an absorption of 1 or more."""

    def __init__(self, t60: float, alpha: float):
        self.t60 = t60
        self.alpha = alpha
        super().__init__(f"unachievable T60 {t60} s (absorption {alpha:.3f} >= 1)")


class PositionOutsideRoomError(AcousticsError):
    """Raised when a source or microphone lies outside the room."""

    def __init__(self, what: str, position: Sequence[float], dims: Sequence[float]):
        self.what = what
        self.position = tuple(position)
        self.dims = tuple(dims)
        super().__init__(f"{what} position {self.position} outside room {self.dims}")


class InsufficientDecayError(AcousticsError):
    """Raised when an energy decay curve never spans the fit range."""

    def __init__(self, reached_db: float):
        self.reached_db = reached_db
        super().__init__(f"insufficient decay: curve reaches only {reached_db:.1f} dB")


class GeometryError(AcousticsError):
    """Raised when no valid source placement is found."""

    def __init__(self, dims: Sequence[float], distance: float, attempts: int):
        self.dims = tuple(dims)
        self.distance = distance
        self.attempts = attempts
        super().__init__(
            f"No placement at {distance} m in room {self.dims} after {attempts} attempts"
        )


# ============================================================
# SCENES
# ============================================================


class SceneError(EchoExtractError):
    """Base exception for scene generation."""

    pass


class DegenerateSourceError(SceneError):
    """Raised when a mixed component has (near) zero power."""

    def __init__(self, component: str, power: float):
        self.component = component
        self.power = power
        super().__init__(f"degenerate source: {component} power {power:.3e}")


class InvalidSirError(SceneError):
    """Raised when a target SIR is NaN or infinite."""

    def __init__(self, sir_db: float):
        self.sir_db = sir_db
        super().__init__(f"target SIR must be finite, got {sir_db} dB")


class SourceBankError(SceneError):
    """Raised for missing or malformed source material."""

    pass


# ============================================================
# AUTODIFF AND NETWORKS
# ============================================================


class TapeError(EchoExtractError):
    """Raised for invalid use of a gradient tape."""

    pass


class FusionShapeError(ShapeMismatchError):
    """Raised when an embedding cannot be fused with a latent."""

    def __init__(self, mode: str, latent: tuple[int, ...], embedding: tuple[int, ...]):
        self.mode = mode
        super().__init__(f"fuse[{mode}]", [latent, embedding])


# ============================================================
# METRICS
# ============================================================


class MetricError(EchoExtractError):
    """Base exception for objectives and metrics."""

    pass


class LengthMismatchError(MetricError):
    """Raised when estimate and reference lengths differ."""

    def __init__(self, metric: str, estimate_len: int, reference_len: int):
        self.metric = metric
        super().__init__(f"{metric}: estimate has {estimate_len} samples, reference {reference_len}")


class SilentReferenceError(MetricError):
    """Raised when a scale-invariant metric gets an all-zero reference."""

    def __init__(self, metric: str):
        self.metric = metric
        super().__init__(f"{metric}: reference is silent")


# ============================================================
# TRAINING AND CHECKPOINTS
# ============================================================


class TrainingDivergedError(EchoExtractError):
    """Raised when the training loss becomes non-finite."""

    def __init__(self, epoch: int, batch: int, grad_norms: dict[str, float]):
        self.epoch = epoch
        self.batch = batch
        self.grad_norms = grad_norms
        finite = [v for v in grad_norms.values() if v == v]
        largest = max(finite) if finite else float("nan")
        super().__init__(
            f"Non-finite loss at epoch {epoch}, batch {batch} (largest grad norm {largest:.3e})"
        )


class CheckpointFormatError(EchoExtractError):
    """Raised for unreadable or inconsistent checkpoint files."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Invalid checkpoint {path}: {reason}")


# ============================================================
# CONFIGURATION
# ============================================================


class ConfigError(EchoExtractError):
    """Raised for invalid experiment configuration."""

    pass


class UnknownConfigKeyError(ConfigError):
    """Raised when a config document contains a key the schema lacks."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unknown key: {key}")
