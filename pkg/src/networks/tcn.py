"""
Temporal Convolutional Stack
============================

Residual 1-D conv blocks: 1x1 conv B->H, PReLU, norm, depthwise dilated
conv (kernel P, dilation 2^x), PReLU, norm, 1x1 conv H->B. Causal stacks
pad on the left only and use cumulative layer norm.
"""

from ..autodiff import Tensor, conv1d, ops
from .config import ModelConfig
from .norms import normalize
from .params import ModelParams


def dilation_padding(kernel: int, dilation: int, causal: bool) -> tuple[int, int]:
    """(left, right) zero padding keeping the frame count unchanged."""
    total = (kernel - 1) * dilation
    if causal:
        return total, 0
    left = total // 2
    return left, total - left


def receptive_field(config: ModelConfig) -> int:
    """Frames seen by one output frame across all repeats of a stack."""
    tcn = config.tcn
    per_repeat = (tcn.kernel_size - 1) * sum(2**x for x in range(tcn.blocks_per_repeat))
    return 1 + tcn.repeats * per_repeat


def tcn_block(x: Tensor, params: ModelParams, name: str, dilation: int, config: ModelConfig) -> Tensor:
    hidden = config.tcn.hidden_channels
    left, right = dilation_padding(config.tcn.kernel_size, dilation, config.causal)
    kind = config.norm_kind

    y = conv1d(x, params[f"{name}.conv_in.weight"])
    y = ops.prelu(y, params[f"{name}.prelu1.slope"])
    y = normalize(kind, y, params[f"{name}.norm1.gain"], params[f"{name}.norm1.bias"])
    y = conv1d(
        y,
        params[f"{name}.depthwise.weight"],
        dilation=dilation,
        groups=hidden,
        left_pad=left,
        right_pad=right,
    )
    y = ops.prelu(y, params[f"{name}.prelu2.slope"])
    y = normalize(kind, y, params[f"{name}.norm2.gain"], params[f"{name}.norm2.bias"])
    y = conv1d(y, params[f"{name}.conv_out.weight"])
    return x + y


def tcn_core(x: Tensor, params: ModelParams, prefix: str, config: ModelConfig) -> Tensor:
    """All R x X residual blocks on a (B x T) input; output keeps the shape."""
    tcn = config.tcn
    for i in range(tcn.repeats * tcn.blocks_per_repeat):
        x = tcn_block(x, params, f"{prefix}.blocks.{i}", 2 ** (i % tcn.blocks_per_repeat), config)
    return x
