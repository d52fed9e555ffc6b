"""
Objectives
==========

SDR (training objective and evaluation), SI-SDR, near-end estimation and
SI-SDR improvement. Numpy functions take 1-D arrays; `sdr_loss` takes a
tensor estimate and is differentiable.
"""

from typing import TYPE_CHECKING, Union

import numpy as np

from ..autodiff import Tensor, ops
from ..dsp import Waveform
from ..errors import LengthMismatchError, SilentReferenceError

if TYPE_CHECKING:
    from ..scenes import AerScene

EPS = 1e-8
DB_CAP = 80.0

ArrayLike = Union[np.ndarray, Waveform]


def _array(x: ArrayLike) -> np.ndarray:
    return x.samples if isinstance(x, Waveform) else np.asarray(x, dtype=np.float64)


def _pair(metric: str, estimate: ArrayLike, reference: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    est, ref = _array(estimate), _array(reference)
    if est.shape != ref.shape:
        raise LengthMismatchError(metric, est.size, ref.size)
    return est.astype(np.float64), ref.astype(np.float64)


def _cap(value: float) -> float:
    return float(np.clip(value, -DB_CAP, DB_CAP))


def sdr(reference: ArrayLike, estimate: ArrayLike) -> float:
    """10 log10((|x0|^2 + eps) / (|x0 - x0_hat|^2 + eps)), capped at +-80 dB."""
    est, ref = _pair("sdr", estimate, reference)
    num = float(np.sum(ref**2)) + EPS
    den = float(np.sum((ref - est) ** 2)) + EPS
    return _cap(10.0 * np.log10(num / den))


def sdr_loss(reference: Union[ArrayLike, Tensor], estimate: Tensor) -> Tensor:
    """Negative SDR as a scalar tensor."""
    ref = reference if isinstance(reference, Tensor) else Tensor(_array(reference).astype(estimate.dtype))
    if ref.shape != estimate.shape:
        raise LengthMismatchError("sdr_loss", estimate.size, ref.size)
    num = ops.sum(ref * ref) + EPS
    err = ref - estimate
    den = ops.sum(err * err) + EPS
    return (ops.log(den) - ops.log(num)) * (10.0 / np.log(10.0))


def si_sdr(estimate: ArrayLike, reference: ArrayLike) -> float:
    """Scale-invariant SDR in dB, capped at +-80 dB."""
    est, ref = _pair("si_sdr", estimate, reference)
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise SilentReferenceError("si_sdr")
    target = (float(np.dot(est, ref)) / ref_energy) * ref
    noise = est - target
    target_energy = float(np.dot(target, target))
    if target_energy == 0.0:
        return -DB_CAP
    return _cap(10.0 * np.log10(target_energy / (float(np.dot(noise, noise)) + EPS)))


def near_end_estimate(mixture: ArrayLike, echo_estimate: ArrayLike) -> np.ndarray:
    """x1_hat = y - x0_hat."""
    est, mix = _pair("near_end_estimate", echo_estimate, mixture)
    return mix - est


def si_sdri(scene: "AerScene", near_estimate: ArrayLike) -> float:
    """SI-SDR gain of the near-end estimate over the unprocessed mixture."""
    return si_sdr(near_estimate, scene.near_end) - si_sdr(scene.mixture, scene.near_end)
