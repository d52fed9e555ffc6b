"""
Networks
========

Encoders, decoder, TCN and DPRNN stacks, embedding fusion and the
complete extraction model.
"""

from .codec import decoder_forward, encoder_forward
from .config import (
    REFERENCE_SIZES,
    DprnnConfig,
    EncoderConfig,
    ModelConfig,
    TcnConfig,
    desk_model_config,
    dprnn_config,
    reference_configs,
    tcn_config,
)
from .dprnn import dprnn_core
from .extractor import (
    ExtractionModel,
    ModelOutput,
    algorithmic_lookahead,
    average_embeddings,
    aux_forward,
    extract_forward,
    fuse,
)
from .norms import clnorm, glnorm, layer_norm
from .params import ModelParams, ParamSpec, build_registry, param_breakdown, param_count
from .stacks import dprnn_stack_forward, stack_forward, tcn_stack_forward
from .tcn import receptive_field, tcn_core

__all__ = [
    "REFERENCE_SIZES",
    "DprnnConfig",
    "EncoderConfig",
    "ExtractionModel",
    "ModelConfig",
    "ModelOutput",
    "ModelParams",
    "ParamSpec",
    "TcnConfig",
    "algorithmic_lookahead",
    "average_embeddings",
    "aux_forward",
    "build_registry",
    "clnorm",
    "decoder_forward",
    "desk_model_config",
    "dprnn_config",
    "dprnn_core",
    "dprnn_stack_forward",
    "encoder_forward",
    "extract_forward",
    "fuse",
    "glnorm",
    "layer_norm",
    "param_breakdown",
    "param_count",
    "receptive_field",
    "reference_configs",
    "stack_forward",
    "tcn_config",
    "tcn_core",
    "tcn_stack_forward",
]
