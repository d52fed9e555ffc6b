"""
Dual-Path Recurrent Stack
=========================

The (B x T) latent is cut into 50%-overlapping chunks of K frames. Each
block runs an intra-chunk LSTM along the chunk axis and an inter-chunk
LSTM across chunks, each followed by a linear map back to B features, a
norm and a residual connection. Chunks are overlap-added at the end.
"""

from ..autodiff import Tensor, bilstm_seq, fold, ops, unfold
from .config import ModelConfig
from .norms import layer_norm
from .params import ModelParams


def _path(
    x: Tensor, params: ModelParams, name: str, bidirectional: bool, config: ModelConfig
) -> Tensor:
    """LSTM along axis 1 of x (batch x steps x B), linear, norm, residual."""
    backward = params.lstm(f"{name}.bwd") if bidirectional else None
    h = bilstm_seq(x, params.lstm(f"{name}.fwd"), backward)
    h = h @ params[f"{name}.linear.weight"] + params[f"{name}.linear.bias"]
    gain, bias = params[f"{name}.norm.gain"], params[f"{name}.norm.bias"]
    if config.causal:
        h = layer_norm(h, gain, bias, channel_axis=2, time_axis=1)
    else:
        h = layer_norm(h, gain, bias, channel_axis=2)
    return x + h


def dprnn_block(chunks: Tensor, params: ModelParams, name: str, config: ModelConfig) -> Tensor:
    """One intra + inter pass over chunks (S x K x B)."""
    chunks = _path(chunks, params, f"{name}.intra", config.dprnn.intra_bidirectional, config)
    across = ops.transpose(chunks, (1, 0, 2))
    across = _path(across, params, f"{name}.inter", not config.causal, config)
    return ops.transpose(across, (1, 0, 2))


def dprnn_core(x: Tensor, params: ModelParams, prefix: str, config: ModelConfig) -> Tensor:
    """Chunk, run every block, overlap-add back to (B x T)."""
    d = config.dprnn
    length = x.shape[1]
    chunks = unfold(x, d.chunk, d.hop)
    for i in range(d.blocks_per_stack):
        chunks = dprnn_block(chunks, params, f"{prefix}.blocks.{i}", config)
    return fold(chunks, length, d.hop)
