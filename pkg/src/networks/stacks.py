"""
Stack Shell
===========

Shared frame of the aux and extraction stacks: input norm, 1x1
bottleneck, the TCN or DPRNN core, PReLU and the stack's 1x1 output
projection.
"""

from ..autodiff import Tensor, conv1d, ops
from ..errors import ShapeMismatchError
from .config import ModelConfig
from .dprnn import dprnn_core
from .norms import normalize
from .params import OUTPUT_PROJECTIONS, ModelParams
from .tcn import tcn_core


def stack_forward(x: Tensor, params: ModelParams, prefix: str, config: ModelConfig) -> Tensor:
    """Run stack `prefix` (aux, ext1 or ext2) on x (C_in x T)."""
    gain = params[f"{prefix}.input_norm.gain"]
    if x.ndim != 2 or x.shape[0] != gain.shape[0]:
        raise ShapeMismatchError(f"{prefix} stack", [x.shape, gain.shape])

    y = normalize(config.norm_kind, x, gain, params[f"{prefix}.input_norm.bias"])
    y = conv1d(y, params[f"{prefix}.bottleneck.weight"])
    if config.arch == "tcn":
        y = tcn_core(y, params, prefix, config)
    else:
        y = dprnn_core(y, params, prefix, config)
    y = ops.prelu(y, params[f"{prefix}.output_prelu.slope"])
    return conv1d(y, params[f"{prefix}.{OUTPUT_PROJECTIONS[prefix]}.weight"])


def tcn_stack_forward(latent: Tensor, params: ModelParams, config: ModelConfig, prefix: str = "aux") -> Tensor:
    if config.arch != "tcn":
        raise ValueError(f"Config describes a {config.arch} model")
    return stack_forward(latent, params, prefix, config)


def dprnn_stack_forward(latent: Tensor, params: ModelParams, config: ModelConfig, prefix: str = "aux") -> Tensor:
    if config.arch != "dprnn":
        raise ValueError(f"Config describes a {config.arch} model")
    return stack_forward(latent, params, prefix, config)
