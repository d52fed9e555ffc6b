"""
Convolution and Chunking Primitives
===================================

1-D convolution (strided, dilated, grouped, explicit left/right zero
padding), transposed 1-D convolution, and the unfold/fold pair that cuts
a (channels x frames) tensor into overlapping chunks and overlap-adds
them back.
"""

from typing import Optional

import numpy as np

from ..errors import ShapeMismatchError
from .tensor import Tensor, record


def conv_output_length(length: int, kernel: int, stride: int = 1, dilation: int = 1) -> int:
    return (length - dilation * (kernel - 1) - 1) // stride + 1


def conv1d(
    x: Tensor,
    weight: Tensor,
    bias: Optional[Tensor] = None,
    stride: int = 1,
    dilation: int = 1,
    groups: int = 1,
    left_pad: int = 0,
    right_pad: int = 0,
) -> Tensor:
    """
    Convolve x (C_in x T) with weight (C_out x C_in/groups x K).

    Returns (C_out x T_out) with T_out computed on the padded input.
    """
    if x.ndim != 2 or weight.ndim != 3:
        raise ShapeMismatchError("conv1d", [x.shape, weight.shape])
    c_in, length = x.shape
    c_out, c_group, kernel = weight.shape
    if c_in % groups or c_out % groups or c_group * groups != c_in:
        raise ShapeMismatchError("conv1d", [x.shape, weight.shape])
    if bias is not None and bias.shape != (c_out,):
        raise ShapeMismatchError("conv1d", [weight.shape, bias.shape])

    padded_len = length + left_pad + right_pad
    t_out = conv_output_length(padded_len, kernel, stride, dilation)
    if t_out < 1:
        raise ShapeMismatchError("conv1d", [x.shape, weight.shape])

    xp = np.pad(x.data, ((0, 0), (left_pad, right_pad)))
    taps = np.arange(kernel)[:, None] * dilation + np.arange(t_out)[None, :] * stride
    cols = xp[:, taps]  # (C_in, K, T_out)
    w = weight.data

    if groups == 1:
        out = np.tensordot(w, cols, axes=([1, 2], [0, 1]))
    else:
        cg = cols.reshape(groups, c_group, kernel, t_out)
        wg = w.reshape(groups, c_out // groups, c_group, kernel)
        out = np.einsum("gckt,gock->got", cg, wg, optimize=True).reshape(c_out, t_out)
    if bias is not None:
        out = out + bias.data[:, None]

    span = stride * (t_out - 1) + 1

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
        if groups == 1:
            gw = np.tensordot(g, cols, axes=([1], [2]))
            gcols = np.tensordot(w, g, axes=([0], [0]))
        else:
            gg = g.reshape(groups, c_out // groups, t_out)
            cg = cols.reshape(groups, c_group, kernel, t_out)
            wg = w.reshape(groups, c_out // groups, c_group, kernel)
            gw = np.einsum("got,gckt->gock", gg, cg, optimize=True).reshape(w.shape)
            gcols = np.einsum("got,gock->gckt", gg, wg, optimize=True).reshape(cols.shape)
        gxp = np.zeros_like(xp)
        for k in range(kernel):
            start = k * dilation
            gxp[:, start : start + span : stride] += gcols[:, k, :]
        gx = gxp[:, left_pad : left_pad + length]
        gb = g.sum(axis=1) if bias is not None else None
        return gx, gw, gb

    inputs = (x, weight) if bias is None else (x, weight, bias)
    return record("conv1d", out, inputs, pullback)


def conv_transpose1d(x: Tensor, weight: Tensor, stride: int = 1) -> Tensor:
    """
    Transposed convolution of x (C_in x T) with weight (C_in x C_out x K).

    Output length is (T - 1) * stride + K.
    """
    if x.ndim != 2 or weight.ndim != 3 or x.shape[0] != weight.shape[0]:
        raise ShapeMismatchError("conv_transpose1d", [x.shape, weight.shape])
    _, length = x.shape
    _, c_out, kernel = weight.shape
    out_len = (length - 1) * stride + kernel
    span = stride * (length - 1) + 1

    y = np.tensordot(weight.data, x.data, axes=([0], [0]))  # (C_out, K, T)
    out = np.zeros((c_out, out_len), dtype=y.dtype)
    for k in range(kernel):
        out[:, k : k + span : stride] += y[:, k, :]

    def pullback(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gy = np.stack([g[:, k : k + span : stride] for k in range(kernel)], axis=1)
        gx = np.tensordot(weight.data, gy, axes=([1, 2], [0, 1]))
        gw = np.tensordot(x.data, gy, axes=([1], [2]))
        return gx, gw

    return record("conv_transpose1d", out, (x, weight), pullback)


# ============================================================
# CHUNKING
# ============================================================


def num_chunks(length: int, chunk: int, hop: int) -> int:
    """Chunk count with zero right-padding of the tail."""
    if length <= chunk:
        return 1
    return -(-(length - chunk) // hop) + 1


def unfold(x: Tensor, chunk: int, hop: int) -> Tensor:
    """Cut x (C x T) into overlapping chunks, returned as (S x chunk x C)."""
    if x.ndim != 2:
        raise ShapeMismatchError("unfold", [x.shape])
    channels, length = x.shape
    count = num_chunks(length, chunk, hop)
    padded_len = (count - 1) * hop + chunk
    xp = np.pad(x.data, ((0, 0), (0, padded_len - length)))
    taps = np.arange(count)[:, None] * hop + np.arange(chunk)[None, :]
    out = np.transpose(xp[:, taps], (1, 2, 0))
    span = hop * (count - 1) + 1

    def pullback(g: np.ndarray) -> tuple[np.ndarray]:
        gxp = np.zeros((channels, padded_len), dtype=g.dtype)
        for k in range(chunk):
            gxp[:, k : k + span : hop] += g[:, k, :].T
        return (gxp[:, :length],)

    return record("unfold", np.ascontiguousarray(out), (x,), pullback)


def fold(x: Tensor, length: int, hop: int) -> Tensor:
    """Overlap-add chunks (S x chunk x C) into (C x length)."""
    if x.ndim != 3:
        raise ShapeMismatchError("fold", [x.shape])
    count, chunk, channels = x.shape
    if num_chunks(length, chunk, hop) != count:
        raise ShapeMismatchError("fold", [x.shape, (length,)])
    padded_len = (count - 1) * hop + chunk
    span = hop * (count - 1) + 1
    out = np.zeros((channels, padded_len), dtype=x.dtype)
    for k in range(chunk):
        out[:, k : k + span : hop] += x.data[:, k, :].T
    taps = np.arange(count)[:, None] * hop + np.arange(chunk)[None, :]

    def pullback(g: np.ndarray) -> tuple[np.ndarray]:
        gp = np.pad(g, ((0, 0), (0, padded_len - length)))
        return (np.ascontiguousarray(np.transpose(gp[:, taps], (1, 2, 0))),)

    return record("fold", out[:, :length], (x,), pullback)
