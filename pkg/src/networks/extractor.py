"""
Informed Extractor
==================

DNN-Aux turns the encoded far-end reference into an embedding matrix
E (N_emb x T). DNN-Ext-1 processes the encoded microphone mixture, its
output is multiplied with either the time-averaged embedding (TI) or the
frame-wise embedding (TV), and DNN-Ext-2 turns the fused features into a
non-negative mask on the mixture latent. The decoder maps the masked
latent back to an echo estimate.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..autodiff import Tensor, ops
from ..dsp import frame
from ..errors import FusionShapeError
from ..observability import get_logger
from .codec import decoder_forward, encoder_forward
from .config import FusionMode, ModelConfig
from .params import ModelParams
from .stacks import stack_forward

logger = get_logger(__name__)


# ============================================================
# FUSION
# ============================================================


def average_embeddings(embeddings: Tensor) -> Tensor:
    """
    Mean over frames: (N_emb x T) -> (N_emb,).

    Averages offsets from the first frame, so a row of identical values
    comes back unchanged.
    """
    if embeddings.ndim != 2:
        raise FusionShapeError("TI", (), embeddings.shape)
    first = embeddings[:, 0]
    offsets = embeddings - ops.reshape(first, (embeddings.shape[0], 1))
    return first + ops.mean(offsets, axis=1)


def _align_frames(embeddings: Tensor, frames: int) -> Tensor:
    available = embeddings.shape[1]
    if available == frames:
        return embeddings
    logger.warning(
        "Embedding frame count differs from mixture; aligning",
        embedding_frames=available,
        mixture_frames=frames,
    )
    if available > frames:
        return embeddings[:, :frames]
    return ops.pad(embeddings, [(0, 0), (0, frames - available)])


def fuse(latent: Tensor, embedding: Tensor, mode: FusionMode) -> Tensor:
    """
    Multiply (C x T) features with an embedding.

    TI takes a (C,) vector broadcast over frames. TV takes a (C x T')
    matrix multiplied frame by frame; T' is truncated or zero-padded to T.
    """
    if latent.ndim != 2:
        raise FusionShapeError(mode, latent.shape, embedding.shape)
    channels, frames = latent.shape
    if mode == "TI":
        if embedding.shape != (channels,):
            raise FusionShapeError(mode, latent.shape, embedding.shape)
        return latent * ops.reshape(embedding, (channels, 1))
    if mode == "TV":
        if embedding.ndim != 2 or embedding.shape[0] != channels:
            raise FusionShapeError(mode, latent.shape, embedding.shape)
        return latent * _align_frames(embedding, frames)
    raise ValueError(f"Unknown fusion mode {mode!r}")


# ============================================================
# FORWARD PASSES
# ============================================================


def aux_forward(reference_latent: Tensor, params: ModelParams, config: ModelConfig) -> Tensor:
    """Embedding matrix E (N_emb x T) of the encoded reference."""
    return stack_forward(reference_latent, params, "aux", config)


def extract_forward(
    mixture_latent: Tensor,
    embeddings: Tensor,
    params: ModelParams,
    config: ModelConfig,
    mode: Optional[FusionMode] = None,
) -> tuple[Tensor, Tensor]:
    """Return (mask, masked latent), both (N x T)."""
    mode = mode or config.fusion
    emb = average_embeddings(embeddings) if mode == "TI" else embeddings
    h = stack_forward(mixture_latent, params, "ext1", config)
    h = fuse(h, emb, mode)
    mask = ops.relu(stack_forward(h, params, "ext2", config))
    return mask, mixture_latent * mask


@dataclass
class ModelOutput:
    """Tensors of one forward pass."""

    estimate: Tensor
    mask: Tensor
    embeddings: Tensor
    mixture_latent: Tensor


class ExtractionModel:
    """Encoders, aux and extraction stacks and decoder for one config."""

    def __init__(self, config: ModelConfig, params: Optional[ModelParams] = None, seed: int = 0):
        self.config = config
        self.params = params if params is not None else ModelParams.initialize(config, seed)

    def encode(self, signal: np.ndarray, prefix: str) -> Tensor:
        enc = self.config.encoder
        frames = frame(np.asarray(signal, dtype=np.float64), enc.window, enc.stride)
        return encoder_forward(frames, self.params, prefix)

    def forward(self, mixture: np.ndarray, reference: np.ndarray) -> ModelOutput:
        """Echo estimate with the same length as the mixture."""
        y_latent = self.encode(mixture, "encoder_ext")
        a_latent = self.encode(reference, "encoder_aux")
        embeddings = aux_forward(a_latent, self.params, self.config)
        mask, masked = extract_forward(y_latent, embeddings, self.params, self.config)
        estimate = decoder_forward(masked, self.params, len(mixture), self.config.encoder.stride)
        return ModelOutput(estimate=estimate, mask=mask, embeddings=embeddings, mixture_latent=y_latent)

    def estimate_echo(self, mixture: np.ndarray, reference: np.ndarray) -> np.ndarray:
        """Inference without recording gradients."""
        return self.forward(mixture, reference).estimate.data.astype(np.float64)


def algorithmic_lookahead(config: ModelConfig) -> Optional[int]:
    """
    Future input samples one output sample may depend on.

    None for non-causal models. TI fusion averages the whole reference and
    is not covered; the bound applies to the TV path.
    """
    if not config.causal:
        return None
    window, stride = config.encoder.window, config.encoder.stride
    if config.arch == "dprnn" and config.dprnn.intra_bidirectional:
        return (config.dprnn.chunk - 1) * stride + window
    return window
