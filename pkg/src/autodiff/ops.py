"""
Differentiable Primitives
=========================

Elementwise arithmetic, nonlinearities, reductions and shape operations.
Each primitive computes its value with numpy and records a pullback that
maps the output gradient to one gradient per input.
"""

from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from ..errors import ShapeMismatchError
from .tensor import Tensor, TensorLike, as_tensor, record

Axis = Optional[Union[int, tuple[int, ...]]]


# ============================================================
# HELPERS
# ============================================================


def unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _pair(op: str, a: TensorLike, b: TensorLike) -> tuple[Tensor, Tensor]:
    like: Optional[Tensor] = None
    if isinstance(a, Tensor):
        like = a
    elif isinstance(b, Tensor):
        like = b
    ta = as_tensor(a, like)
    tb = as_tensor(b, like)
    try:
        np.broadcast_shapes(ta.shape, tb.shape)
    except ValueError as e:
        raise ShapeMismatchError(op, [ta.shape, tb.shape]) from e
    return ta, tb


# ============================================================
# ARITHMETIC
# ============================================================


def add(a: TensorLike, b: TensorLike) -> Tensor:
    ta, tb = _pair("add", a, b)

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return unbroadcast(g, ta.shape), unbroadcast(g, tb.shape)

    return record("add", ta.data + tb.data, (ta, tb), pullback)


def sub(a: TensorLike, b: TensorLike) -> Tensor:
    ta, tb = _pair("sub", a, b)

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return unbroadcast(g, ta.shape), unbroadcast(-g, tb.shape)

    return record("sub", ta.data - tb.data, (ta, tb), pullback)


def mul(a: TensorLike, b: TensorLike) -> Tensor:
    ta, tb = _pair("mul", a, b)

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return unbroadcast(g * tb.data, ta.shape), unbroadcast(g * ta.data, tb.shape)

    return record("mul", ta.data * tb.data, (ta, tb), pullback)


def div(a: TensorLike, b: TensorLike) -> Tensor:
    ta, tb = _pair("div", a, b)
    out = ta.data / tb.data

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return unbroadcast(g / tb.data, ta.shape), unbroadcast(-g * out / tb.data, tb.shape)

    return record("div", out, (ta, tb), pullback)


def neg(x: Tensor) -> Tensor:
    return record("neg", -x.data, (x,), lambda g: (-g,))


def reciprocal(x: Tensor) -> Tensor:
    out = 1.0 / x.data
    return record("reciprocal", out, (x,), lambda g: (-g * out * out,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product with numpy batch broadcasting; both operands need ndim >= 2."""
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatchError("matmul", [a.shape, b.shape])
    try:
        out = np.matmul(a.data, b.data)
    except ValueError as e:
        raise ShapeMismatchError("matmul", [a.shape, b.shape]) from e

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return unbroadcast(ga, a.shape), unbroadcast(gb, b.shape)

    return record("matmul", out, (a, b), pullback)


# ============================================================
# NONLINEARITIES
# ============================================================


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return record("relu", np.where(mask, x.data, 0.0).astype(x.dtype), (x,), lambda g: (g * mask,))


def prelu(x: Tensor, slope: Tensor) -> Tensor:
    """Parametric ReLU; `slope` broadcasts against `x`."""
    try:
        np.broadcast_shapes(x.shape, slope.shape)
    except ValueError as e:
        raise ShapeMismatchError("prelu", [x.shape, slope.shape]) from e
    mask = x.data > 0
    out = np.where(mask, x.data, slope.data * x.data)

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gx = g * np.where(mask, 1.0, slope.data)
        gs = unbroadcast(g * np.where(mask, 0.0, x.data), slope.shape)
        return unbroadcast(gx, x.shape), gs

    return record("prelu", out, (x, slope), pullback)


def sigmoid(x: Tensor) -> Tensor:
    out = expit(x.data)
    return record("sigmoid", out, (x,), lambda g: (g * out * (1.0 - out),))


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)
    return record("tanh", out, (x,), lambda g: (g * (1.0 - out * out),))


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)
    return record("exp", out, (x,), lambda g: (g * out,))


def log(x: Tensor) -> Tensor:
    return record("log", np.log(x.data), (x,), lambda g: (g / x.data,))


def sqrt(x: Tensor) -> Tensor:
    out = np.sqrt(x.data)
    return record("sqrt", out, (x,), lambda g: (g * 0.5 / out,))


# ============================================================
# REDUCTIONS
# ============================================================


def _expand_reduced(g: np.ndarray, shape: tuple[int, ...], axis: Axis, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        axes = (axis,) if isinstance(axis, int) else axis
        g = np.expand_dims(g, tuple(a % len(shape) for a in axes))
    elif axis is None and not keepdims:
        g = np.reshape(g, (1,) * len(shape))
    return np.broadcast_to(g, shape)


def sum(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    out = np.sum(x.data, axis=axis, keepdims=keepdims)
    return record("sum", out, (x,), lambda g: (_expand_reduced(g, x.shape, axis, keepdims),))


def mean(x: Tensor, axis: Axis = None, keepdims: bool = False) -> Tensor:
    out = np.mean(x.data, axis=axis, keepdims=keepdims)
    count = x.size // max(out.size, 1)

    def pullback(g: np.ndarray) -> tuple[np.ndarray]:
        return (_expand_reduced(g / count, x.shape, axis, keepdims),)

    return record("mean", out, (x,), pullback)


def cumsum(x: Tensor, axis: int) -> Tensor:
    def pullback(g: np.ndarray) -> tuple[np.ndarray]:
        return (np.flip(np.cumsum(np.flip(g, axis), axis=axis), axis),)

    return record("cumsum", np.cumsum(x.data, axis=axis), (x,), pullback)


# ============================================================
# SHAPE OPERATIONS
# ============================================================


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ValueError("concat needs at least one tensor")
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as e:
        raise ShapeMismatchError("concat", [t.shape for t in tensors]) from e
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def pullback(g: np.ndarray) -> list[np.ndarray]:
        return np.split(g, bounds, axis=axis)

    return record("concat", out, tuple(tensors), pullback)


def index(x: Tensor, key: Any) -> Tensor:
    """Basic or integer-array indexing."""
    out = x.data[key]

    def pullback(g: np.ndarray) -> tuple[np.ndarray]:
        full = np.zeros_like(x.data)
        np.add.at(full, key, g)
        return (full,)

    return record("index", np.array(out), (x,), pullback)


def transpose(x: Tensor, axes: Optional[Sequence[int]] = None) -> Tensor:
    perm = tuple(axes) if axes is not None else tuple(reversed(range(x.ndim)))
    inverse = tuple(int(i) for i in np.argsort(perm))
    return record(
        "transpose", np.transpose(x.data, perm), (x,), lambda g: (np.transpose(g, inverse),)
    )


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = np.reshape(x.data, tuple(shape))
    except ValueError as e:
        raise ShapeMismatchError("reshape", [x.shape, tuple(shape)]) from e
    return record("reshape", out, (x,), lambda g: (np.reshape(g, x.shape),))


def pad(x: Tensor, widths: Sequence[tuple[int, int]]) -> Tensor:
    """Zero padding; `widths` holds (before, after) per axis."""
    if len(widths) != x.ndim:
        raise ShapeMismatchError("pad", [x.shape, (len(widths),)])
    keep = tuple(slice(lo, lo + n) for (lo, _), n in zip(widths, x.shape))
    return record("pad", np.pad(x.data, list(widths)), (x,), lambda g: (g[keep],))
