"""
Optimizer
=========

Adam with L2 weight decay coupled into the gradient, and global l2
gradient clipping.
"""

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import ShapeMismatchError
from ..networks import ModelParams

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8

Grads = dict[str, np.ndarray]


@dataclass
class OptimState:
    """Adam moments per parameter, step counter and current learning rate."""

    lr: float
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_params(cls, params: ModelParams, lr: float) -> "OptimState":
        return cls(
            lr=lr,
            m={name: np.zeros_like(t.data) for name, t in params.items()},
            v={name: np.zeros_like(t.data) for name, t in params.items()},
        )


def adam_step(
    params: ModelParams,
    grads: Mapping[str, np.ndarray],
    state: OptimState,
    weight_decay: float = 0.0,
) -> None:
    """One in-place Adam update of every parameter."""
    state.step += 1
    bias1 = 1.0 - BETA1**state.step
    bias2 = 1.0 - BETA2**state.step
    for name, tensor in params.items():
        grad = grads[name]
        if grad.shape != tensor.shape or state.m[name].shape != tensor.shape:
            raise ShapeMismatchError(f"adam[{name}]", [grad.shape, tensor.shape, state.m[name].shape])
        g = grad + weight_decay * tensor.data
        m = BETA1 * state.m[name] + (1.0 - BETA1) * g
        v = BETA2 * state.v[name] + (1.0 - BETA2) * g * g
        update = state.lr * (m / bias1) / (np.sqrt(v / bias2) + ADAM_EPS)
        state.m[name] = m.astype(tensor.dtype)
        state.v[name] = v.astype(tensor.dtype)
        tensor.data = (tensor.data - update).astype(tensor.dtype)


def global_norm(grads: Mapping[str, np.ndarray]) -> float:
    return float(np.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads.values())))


def clip_grad_l2(grads: Mapping[str, np.ndarray], max_norm: float = 5.0) -> Grads:
    """Scale all gradients by max_norm / norm when the global norm exceeds max_norm."""
    norm = global_norm(grads)
    if norm <= max_norm or not np.isfinite(norm):
        return dict(grads)
    scale = max_norm / norm
    return {name: (g * scale).astype(g.dtype) for name, g in grads.items()}


def grad_norms(grads: Mapping[str, np.ndarray]) -> dict[str, float]:
    """Per-parameter l2 norms, for divergence diagnostics."""
    return {name: float(np.linalg.norm(g)) for name, g in grads.items()}
