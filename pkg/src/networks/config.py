"""
Model Configuration
===================

Pydantic models describing an extraction network. Defaults are the
full-scale configuration (16 kHz, N=256); `desk_model_config` is the
reduced preset used for quick experiments.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Architecture = Literal["tcn", "dprnn"]
FusionMode = Literal["TI", "TV"]
DType = Literal["float32", "float64"]


class EncoderConfig(BaseModel):
    """Learned analysis/synthesis filterbank."""

    model_config = ConfigDict(extra="forbid")

    window: int = Field(default=32, gt=0, description="Filter length L in samples")
    stride: int = Field(default=16, gt=0, description="Frame hop in samples")
    channels: int = Field(default=256, gt=0, description="Latent channels N (= N_emb)")


class TcnConfig(BaseModel):
    """Temporal convolutional stack; each stack has `repeats` x `blocks_per_repeat` blocks."""

    model_config = ConfigDict(extra="forbid")

    bottleneck_channels: int = Field(default=64, gt=0, description="B")
    hidden_channels: int = Field(default=96, gt=0, description="H")
    kernel_size: int = Field(default=3, gt=0, description="P")
    blocks_per_repeat: int = Field(default=6, gt=0, description="X")
    repeats: int = Field(default=2, gt=0, description="R")


class DprnnConfig(BaseModel):
    """Dual-path recurrent stack."""

    model_config = ConfigDict(extra="forbid")

    bottleneck: int = Field(default=64, gt=0, description="Feature width inside the stack")
    chunk: int = Field(default=30, gt=1, description="Chunk length K in frames")
    hidden: int = Field(default=128, gt=0, description="LSTM units per direction")
    blocks_per_stack: int = Field(default=2, gt=0)
    intra_bidirectional: bool = Field(
        default=True,
        description="Bidirectional intra-chunk LSTM; causal models then look ahead one chunk",
    )

    @property
    def hop(self) -> int:
        return self.chunk // 2


class ModelConfig(BaseModel):
    """Complete description of one extraction network."""

    model_config = ConfigDict(extra="forbid")

    arch: Architecture = "dprnn"
    fusion: FusionMode = "TV"
    causal: bool = False
    sample_rate: int = Field(default=16000, gt=0)
    dtype: DType = "float32"
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)
    tcn: TcnConfig = Field(default_factory=TcnConfig)
    dprnn: DprnnConfig = Field(default_factory=DprnnConfig)

    @model_validator(mode="after")
    def _check_geometry(self) -> "ModelConfig":
        if self.encoder.stride > self.encoder.window:
            raise ValueError(
                f"Encoder stride {self.encoder.stride} exceeds window {self.encoder.window}"
            )
        return self

    @property
    def embedding_channels(self) -> int:
        return self.encoder.channels

    @property
    def norm_kind(self) -> Literal["gln", "cln"]:
        return "cln" if self.causal else "gln"


def tcn_config(**overrides: object) -> ModelConfig:
    """Full-scale TCN model."""
    return ModelConfig(arch="tcn", **overrides)  # type: ignore[arg-type]


def dprnn_config(causal: bool = False, **overrides: object) -> ModelConfig:
    """Full-scale DPRNN model; causal selects cLN and a one-way inter-chunk LSTM."""
    return ModelConfig(arch="dprnn", causal=causal, **overrides)  # type: ignore[arg-type]


def desk_model_config(arch: Architecture = "dprnn", fusion: FusionMode = "TV") -> ModelConfig:
    """Reduced model for 8 kHz desk-scale runs."""
    return ModelConfig(
        arch=arch,
        fusion=fusion,
        sample_rate=8000,
        encoder=EncoderConfig(channels=64),
        tcn=TcnConfig(repeats=1),
        dprnn=DprnnConfig(blocks_per_stack=1),
    )


# Reference model sizes (parameters) for the full-scale configurations.
REFERENCE_SIZES: dict[str, int] = {
    "TCN": 590_000,
    "DPRNN": 2_740_000,
    "causal DPRNN": 2_100_000,
}


def reference_configs() -> dict[str, ModelConfig]:
    return {
        "TCN": tcn_config(),
        "DPRNN": dprnn_config(),
        "causal DPRNN": dprnn_config(causal=True),
    }
