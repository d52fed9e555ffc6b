"""
Checkpoints
===========

Binary checkpoint container:

    b"ISEC" | u32 version | u32 header length | JSON header | tensor data

The header is canonical JSON (sorted keys, compact separators) holding the
model config, a tensor registry (name, shape, dtype, byte offset, byte
count, group), optimizer scalars, scheduler state, epoch history and run
metadata. Tensor data follows as little-endian raw arrays in registry
order. Writing a loaded checkpoint reproduces the file byte for byte.
"""

import json
import os
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from ..errors import CheckpointFormatError
from ..networks import ExtractionModel, ModelConfig, ModelParams, build_registry
from ..observability import get_logger
from .optim import OptimState

logger = get_logger(__name__)

MAGIC = b"ISEC"
FORMAT_VERSION = 1
PREFIX = struct.Struct("<4sII")

GROUPS = ("param", "adam_m", "adam_v")


@dataclass
class EpochRecord:
    """One row of the training log."""

    epoch: int
    train_loss: float
    val_loss: float
    lr: float
    seconds: float = 0.0


@dataclass
class Checkpoint:
    """Everything needed to rebuild a model and resume its training."""

    config: ModelConfig
    params: dict[str, np.ndarray]
    optim: Optional[OptimState] = None
    history: list[EpochRecord] = field(default_factory=list)
    scheduler: dict[str, float] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def epoch(self) -> int:
        return self.history[-1].epoch if self.history else 0

    def to_model(self) -> ExtractionModel:
        return ExtractionModel(self.config, ModelParams.from_arrays(self.config, self.params))

    @classmethod
    def from_model(cls, model: ExtractionModel, **kwargs: Any) -> "Checkpoint":
        return cls(config=model.config, params=model.params.arrays(), **kwargs)


# ============================================================
# ENCODING
# ============================================================


def _tensor_groups(ckpt: Checkpoint) -> list[tuple[str, str, np.ndarray]]:
    items = [("param", name, value) for name, value in ckpt.params.items()]
    if ckpt.optim is not None:
        items += [("adam_m", name, value) for name, value in ckpt.optim.m.items()]
        items += [("adam_v", name, value) for name, value in ckpt.optim.v.items()]
    return items


def _little_endian(value: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(value)
    return arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes()


def _history_row(record: EpochRecord) -> dict[str, Any]:
    # Wall-clock seconds are not stored.
    row = asdict(record)
    row.pop("seconds")
    return row


def encode_checkpoint(ckpt: Checkpoint) -> bytes:
    entries, blobs, offset = [], [], 0
    for group, name, value in _tensor_groups(ckpt):
        blob = _little_endian(value)
        entries.append(
            {
                "name": name,
                "group": group,
                "shape": list(value.shape),
                "dtype": value.dtype.name,
                "offset": offset,
                "nbytes": len(blob),
            }
        )
        blobs.append(blob)
        offset += len(blob)

    header = {
        "format_version": FORMAT_VERSION,
        "model": ckpt.config.model_dump(mode="json"),
        "tensors": entries,
        "optimizer": None if ckpt.optim is None else {"step": ckpt.optim.step, "lr": ckpt.optim.lr},
        "scheduler": ckpt.scheduler,
        "history": [_history_row(r) for r in ckpt.history],
        "meta": ckpt.meta,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return PREFIX.pack(MAGIC, FORMAT_VERSION, len(header_bytes)) + header_bytes + b"".join(blobs)


def save_checkpoint(path: Union[str, Path], ckpt: Checkpoint) -> Path:
    """Write atomically via a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(encode_checkpoint(ckpt))
    os.replace(tmp, path)
    logger.debug("Saved checkpoint", path=str(path), epoch=ckpt.epoch)
    return path


# ============================================================
# DECODING
# ============================================================


def _read_header(raw: bytes, where: str) -> tuple[dict[str, Any], int]:
    if len(raw) < PREFIX.size:
        raise CheckpointFormatError(where, "truncated prefix")
    magic, version, header_len = PREFIX.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointFormatError(where, f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointFormatError(where, f"unsupported version {version}")
    start = PREFIX.size
    if len(raw) < start + header_len:
        raise CheckpointFormatError(where, "truncated header")
    try:
        header = json.loads(raw[start : start + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointFormatError(where, f"unreadable header ({e})") from e
    return header, start + header_len


def _check_registry(config: ModelConfig, entries: list[dict[str, Any]], where: str) -> None:
    registry = build_registry(config)
    for group in GROUPS:
        listed = [(e["name"], tuple(e["shape"])) for e in entries if e["group"] == group]
        if group != "param" and not listed:
            continue
        expected = [(name, spec.shape) for name, spec in registry.items()]
        if listed != expected:
            raise CheckpointFormatError(where, f"{group} tensors do not match the model registry")


def _read_tensors(
    raw: bytes, data_start: int, entries: list[dict[str, Any]], where: str
) -> dict[str, dict[str, np.ndarray]]:
    expected_end = data_start + sum(int(e["nbytes"]) for e in entries)
    if len(raw) != expected_end:
        raise CheckpointFormatError(where, f"expected {expected_end} bytes, found {len(raw)}")
    groups: dict[str, dict[str, np.ndarray]] = {g: {} for g in GROUPS}
    for e in entries:
        dtype = np.dtype(e["dtype"]).newbyteorder("<")
        start = data_start + int(e["offset"])
        data = np.frombuffer(raw, dtype=dtype, count=int(np.prod(e["shape"], dtype=np.int64)), offset=start)
        groups[e["group"]][e["name"]] = data.astype(dtype.newbyteorder("="), copy=True).reshape(e["shape"])
    return groups


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """Read and validate a checkpoint; nothing is returned on any format error."""
    where = str(path)
    raw = Path(path).read_bytes()
    header, data_start = _read_header(raw, where)
    try:
        config = ModelConfig.model_validate(header["model"])
        entries = header["tensors"]
    except (KeyError, ValueError) as e:
        raise CheckpointFormatError(where, f"invalid header ({e})") from e
    _check_registry(config, entries, where)
    groups = _read_tensors(raw, data_start, entries, where)

    optim = None
    if header.get("optimizer") is not None:
        optim = OptimState(
            lr=float(header["optimizer"]["lr"]),
            step=int(header["optimizer"]["step"]),
            m=groups["adam_m"],
            v=groups["adam_v"],
        )
    return Checkpoint(
        config=config,
        params=groups["param"],
        optim=optim,
        history=[EpochRecord(**r) for r in header.get("history", [])],
        scheduler=header.get("scheduler", {}),
        meta=header.get("meta", {}),
    )
