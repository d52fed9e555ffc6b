"""
Encoders and Decoder
====================

The encoders map each frame of L samples to N non-negative latent
channels (a strided 1-D convolution written as a per-frame linear map).
The decoder maps latent frames back to L samples and overlap-adds them.
"""

from typing import Union

import numpy as np

from ..autodiff import Tensor, conv_transpose1d, ops
from ..dsp import FrameMatrix
from ..errors import ShapeMismatchError
from .params import ModelParams


def encoder_forward(
    frames: Union[FrameMatrix, np.ndarray], params: ModelParams, prefix: str = "encoder_ext"
) -> Tensor:
    """ReLU(W F + b) for frames F (L x T); returns (N x T)."""
    data = frames.data if isinstance(frames, FrameMatrix) else np.asarray(frames)
    weight, bias = params[f"{prefix}.weight"], params[f"{prefix}.bias"]
    if data.ndim != 2 or data.shape[0] != weight.shape[1]:
        raise ShapeMismatchError(prefix, [data.shape, weight.shape])
    f = Tensor(data.astype(weight.dtype))
    return ops.relu(weight @ f + ops.reshape(bias, (-1, 1)))


def decoder_forward(
    latent: Tensor, params: ModelParams, source_len: int, stride: int
) -> Tensor:
    """Transposed convolution of (N x T) latents, trimmed to source_len samples."""
    weight = params["decoder.weight"]
    if latent.ndim != 2 or latent.shape[0] != weight.shape[0]:
        raise ShapeMismatchError("decoder", [latent.shape, weight.shape])
    out = conv_transpose1d(latent, weight, stride=stride)
    if source_len > out.shape[1]:
        raise ShapeMismatchError("decoder", [out.shape, (1, source_len)])
    return out[0, :source_len]
