"""
Parameter Registry
==================

Every trainable tensor of a model is declared once, by name, in an
ordered registry derived from the ModelConfig. Initialization, parameter
counting and checkpoint validation all read the same registry, so the
counted size is always the size actually allocated.

Name prefixes: encoder_aux, encoder_ext, aux, ext1, ext2, decoder.
"""

from dataclasses import dataclass
from typing import Iterator, Literal, Mapping

import numpy as np

from ..autodiff import LstmParams, Tensor
from ..errors import ShapeMismatchError
from .config import ModelConfig

InitKind = Literal["uniform", "ones", "zeros", "prelu"]

PRELU_INIT = 0.25
STACK_NAMES = ("aux", "ext1", "ext2")
# Output projection of each stack: embedding, fusion point, mask.
OUTPUT_PROJECTIONS = {"aux": "out_proj", "ext1": "fusion_proj", "ext2": "mask_proj"}
COMPONENTS = ("encoder_aux", "encoder_ext", "aux", "ext1", "ext2", "decoder")


@dataclass(frozen=True)
class ParamSpec:
    """Shape and initializer of one registered tensor."""

    shape: tuple[int, ...]
    init: InitKind = "uniform"
    fan_in: int = 1

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))


Registry = dict[str, ParamSpec]


# ============================================================
# REGISTRY BUILDERS
# ============================================================


def _norm(reg: Registry, name: str, channels: int) -> None:
    reg[f"{name}.gain"] = ParamSpec((channels,), "ones")
    reg[f"{name}.bias"] = ParamSpec((channels,), "zeros")


def _conv(reg: Registry, name: str, c_out: int, c_in: int, kernel: int = 1) -> None:
    reg[f"{name}.weight"] = ParamSpec((c_out, c_in, kernel), "uniform", c_in * kernel)


def _lstm(reg: Registry, name: str, features: int, hidden: int) -> None:
    reg[f"{name}.w_ih"] = ParamSpec((features, 4 * hidden), "uniform", hidden)
    reg[f"{name}.w_hh"] = ParamSpec((hidden, 4 * hidden), "uniform", hidden)
    reg[f"{name}.bias"] = ParamSpec((4 * hidden,), "uniform", hidden)


def _tcn_core(reg: Registry, prefix: str, config: ModelConfig) -> None:
    tcn = config.tcn
    b, h, p = tcn.bottleneck_channels, tcn.hidden_channels, tcn.kernel_size
    for i in range(tcn.repeats * tcn.blocks_per_repeat):
        block = f"{prefix}.blocks.{i}"
        _conv(reg, f"{block}.conv_in", h, b)
        reg[f"{block}.prelu1.slope"] = ParamSpec((1,), "prelu")
        _norm(reg, f"{block}.norm1", h)
        reg[f"{block}.depthwise.weight"] = ParamSpec((h, 1, p), "uniform", p)
        reg[f"{block}.prelu2.slope"] = ParamSpec((1,), "prelu")
        _norm(reg, f"{block}.norm2", h)
        _conv(reg, f"{block}.conv_out", b, h)


def _dprnn_path(reg: Registry, name: str, width: int, hidden: int, bidirectional: bool) -> None:
    _lstm(reg, f"{name}.fwd", width, hidden)
    if bidirectional:
        _lstm(reg, f"{name}.bwd", width, hidden)
    directions = 2 if bidirectional else 1
    reg[f"{name}.linear.weight"] = ParamSpec(
        (directions * hidden, width), "uniform", directions * hidden
    )
    reg[f"{name}.linear.bias"] = ParamSpec((width,), "zeros")
    _norm(reg, f"{name}.norm", width)


def _dprnn_core(reg: Registry, prefix: str, config: ModelConfig) -> None:
    d = config.dprnn
    for i in range(d.blocks_per_stack):
        block = f"{prefix}.blocks.{i}"
        _dprnn_path(reg, f"{block}.intra", d.bottleneck, d.hidden, d.intra_bidirectional)
        _dprnn_path(reg, f"{block}.inter", d.bottleneck, d.hidden, not config.causal)


def stack_width(config: ModelConfig) -> int:
    if config.arch == "tcn":
        return config.tcn.bottleneck_channels
    return config.dprnn.bottleneck


def stack_registry(prefix: str, config: ModelConfig, in_channels: int, out_channels: int) -> Registry:
    """Norm, bottleneck, core blocks, PReLU and output projection of one stack."""
    reg: Registry = {}
    width = stack_width(config)
    _norm(reg, f"{prefix}.input_norm", in_channels)
    _conv(reg, f"{prefix}.bottleneck", width, in_channels)
    if config.arch == "tcn":
        _tcn_core(reg, prefix, config)
    else:
        _dprnn_core(reg, prefix, config)
    reg[f"{prefix}.output_prelu.slope"] = ParamSpec((1,), "prelu")
    _conv(reg, f"{prefix}.{OUTPUT_PROJECTIONS[prefix]}", out_channels, width)
    return reg


def build_registry(config: ModelConfig) -> Registry:
    """Ordered registry of every tensor in the model."""
    n, window = config.encoder.channels, config.encoder.window
    reg: Registry = {}
    for name in ("encoder_aux", "encoder_ext"):
        reg[f"{name}.weight"] = ParamSpec((n, window), "uniform", window)
        reg[f"{name}.bias"] = ParamSpec((n,), "zeros")
    reg.update(stack_registry("aux", config, n, config.embedding_channels))
    reg.update(stack_registry("ext1", config, n, config.embedding_channels))
    reg.update(stack_registry("ext2", config, config.embedding_channels, n))
    reg["decoder.weight"] = ParamSpec((n, 1, window), "uniform", n)
    return reg


def param_breakdown(config: ModelConfig) -> dict[str, int]:
    """Parameter count per component."""
    counts = {c: 0 for c in COMPONENTS}
    for name, spec in build_registry(config).items():
        counts[name.split(".", 1)[0]] += spec.size
    return counts


def param_count(config: ModelConfig) -> int:
    return sum(param_breakdown(config).values())


# ============================================================
# PARAMETER STORE
# ============================================================


def _initial_value(spec: ParamSpec, rng: np.random.Generator, dtype: np.dtype) -> np.ndarray:
    if spec.init == "ones":
        return np.ones(spec.shape, dtype=dtype)
    if spec.init == "zeros":
        return np.zeros(spec.shape, dtype=dtype)
    if spec.init == "prelu":
        return np.full(spec.shape, PRELU_INIT, dtype=dtype)
    bound = 1.0 / np.sqrt(spec.fan_in)
    return rng.uniform(-bound, bound, size=spec.shape).astype(dtype)


class ModelParams:
    """Named trainable tensors, in registry order."""

    def __init__(self, config: ModelConfig, tensors: Mapping[str, Tensor]) -> None:
        registry = build_registry(config)
        if list(tensors) != list(registry):
            missing = sorted(set(registry) - set(tensors))
            extra = sorted(set(tensors) - set(registry))
            raise ValueError(f"Parameter names do not match registry (missing={missing}, extra={extra})")
        for name, spec in registry.items():
            if tensors[name].shape != spec.shape:
                raise ShapeMismatchError(f"param {name}", [tensors[name].shape, spec.shape])
        self.config = config
        self._tensors = dict(tensors)

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int = 0) -> "ModelParams":
        rng = np.random.default_rng(seed)
        dtype = np.dtype(config.dtype)
        tensors = {
            name: Tensor(_initial_value(spec, rng, dtype), requires_grad=True, name=name)
            for name, spec in build_registry(config).items()
        }
        return cls(config, tensors)

    @classmethod
    def from_arrays(cls, config: ModelConfig, arrays: Mapping[str, np.ndarray]) -> "ModelParams":
        dtype = np.dtype(config.dtype)
        tensors = {
            name: Tensor(np.array(arrays[name], dtype=dtype), requires_grad=True, name=name)
            for name in build_registry(config)
            if name in arrays
        }
        return cls(config, tensors)

    def __getitem__(self, name: str) -> Tensor:
        return self._tensors[name]

    def __contains__(self, name: object) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def items(self) -> Iterator[tuple[str, Tensor]]:
        return iter(self._tensors.items())

    def total(self) -> int:
        return sum(t.size for t in self._tensors.values())

    def lstm(self, name: str) -> LstmParams:
        return LstmParams(
            w_ih=self[f"{name}.w_ih"], w_hh=self[f"{name}.w_hh"], bias=self[f"{name}.bias"]
        )

    def arrays(self) -> dict[str, np.ndarray]:
        """Copies of the current values."""
        return {name: t.data.copy() for name, t in self._tensors.items()}

    def load_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        for name, tensor in self._tensors.items():
            value = np.asarray(arrays[name])
            if value.shape != tensor.shape:
                raise ShapeMismatchError(f"param {name}", [value.shape, tensor.shape])
            tensor.data = value.astype(tensor.dtype, copy=True)

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.zero_grad()
