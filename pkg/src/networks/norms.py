"""
Layer Normalizations
====================

Global layer norm (statistics over every entry) and cumulative layer
norm (statistics over channels and all frames up to the current one).
Both apply a per-channel gain and bias afterwards.
"""

from typing import Literal, Optional

import numpy as np

from ..autodiff import Tensor, ops
from ..errors import ShapeMismatchError

NORM_EPS = 1e-8


def _affine(y: Tensor, gain: Tensor, bias: Tensor, channel_axis: int) -> Tensor:
    channels = y.shape[channel_axis]
    if gain.shape != (channels,) or bias.shape != (channels,):
        raise ShapeMismatchError("norm", [y.shape, gain.shape, bias.shape])
    shape = [1] * y.ndim
    shape[channel_axis] = channels
    return y * ops.reshape(gain, shape) + ops.reshape(bias, shape)


def layer_norm(
    x: Tensor,
    gain: Tensor,
    bias: Tensor,
    channel_axis: int,
    time_axis: Optional[int] = None,
    eps: float = NORM_EPS,
) -> Tensor:
    """
    Global (time_axis=None) or cumulative layer norm of any-rank x.

    The cumulative form reduces over channel_axis only and accumulates
    along time_axis, so every other axis is normalized independently.
    """
    if time_axis is None:
        mu = ops.mean(x)
        centered = x - mu
        var = ops.mean(centered * centered)
        return _affine(centered / ops.sqrt(var + eps), gain, bias, channel_axis)

    channels = x.shape[channel_axis]
    steps = x.shape[time_axis]
    count_shape = [1] * x.ndim
    count_shape[time_axis] = steps
    count = np.arange(1, steps + 1, dtype=x.dtype).reshape(count_shape) * channels

    total = ops.cumsum(ops.sum(x, axis=channel_axis, keepdims=True), axis=time_axis)
    total_sq = ops.cumsum(ops.sum(x * x, axis=channel_axis, keepdims=True), axis=time_axis)
    mu = total / count
    var = total_sq / count - mu * mu
    return _affine((x - mu) / ops.sqrt(var + eps), gain, bias, channel_axis)


def glnorm(x: Tensor, gain: Tensor, bias: Tensor) -> Tensor:
    """Global layer norm of x (C x T)."""
    return layer_norm(x, gain, bias, channel_axis=0)


def clnorm(x: Tensor, gain: Tensor, bias: Tensor) -> Tensor:
    """Cumulative layer norm of x (C x T); frame t sees frames 0..t only."""
    return layer_norm(x, gain, bias, channel_axis=0, time_axis=1)


def normalize(
    kind: Literal["gln", "cln"],
    x: Tensor,
    gain: Tensor,
    bias: Tensor,
    channel_axis: int = 0,
    time_axis: int = 1,
) -> Tensor:
    return layer_norm(
        x, gain, bias, channel_axis=channel_axis, time_axis=time_axis if kind == "cln" else None
    )
