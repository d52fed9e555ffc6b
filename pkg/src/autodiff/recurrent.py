"""
LSTM Primitives
===============

`lstm_cell` is built from elementary ops and serves as the reference.
`lstm_seq` runs a whole sequence as one fused tape entry with an explicit
backpropagation-through-time pullback, which keeps tapes short for long
chunked sequences.

Gate order in the packed weights is input, forget, cell, output.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from ..errors import ShapeMismatchError
from . import ops
from .tensor import Tensor, record


@dataclass
class LstmParams:
    """Packed weights of one LSTM direction."""

    w_ih: Tensor  # (F, 4H)
    w_hh: Tensor  # (H, 4H)
    bias: Tensor  # (4H,)

    @property
    def hidden(self) -> int:
        return int(self.w_hh.shape[0])

    @property
    def features(self) -> int:
        return int(self.w_ih.shape[0])

    def validate(self) -> None:
        h = self.hidden
        if self.w_hh.shape != (h, 4 * h) or self.w_ih.shape[1] != 4 * h or self.bias.shape != (4 * h,):
            raise ShapeMismatchError("lstm", [self.w_ih.shape, self.w_hh.shape, self.bias.shape])


def lstm_cell(
    x: Tensor, h: Tensor, c: Tensor, params: LstmParams
) -> tuple[Tensor, Tensor]:
    """One step; x (B x F), h and c (B x H). Returns (h', c')."""
    params.validate()
    if x.ndim != 2 or x.shape[1] != params.features:
        raise ShapeMismatchError("lstm_cell", [x.shape, params.w_ih.shape])
    n = params.hidden
    z = x @ params.w_ih + h @ params.w_hh + params.bias
    i = ops.sigmoid(z[:, 0:n])
    f = ops.sigmoid(z[:, n : 2 * n])
    g = ops.tanh(z[:, 2 * n : 3 * n])
    o = ops.sigmoid(z[:, 3 * n : 4 * n])
    c_next = f * c + i * g
    h_next = o * ops.tanh(c_next)
    return h_next, c_next


def _run_forward(
    xw: np.ndarray, w_hh: np.ndarray, n: int, order: list[int]
) -> dict[str, np.ndarray]:
    batch, steps, _ = xw.shape
    dtype = xw.dtype
    cache = {
        name: np.zeros((steps, batch, n), dtype=dtype)
        for name in ("i", "f", "g", "o", "c", "tc", "h")
    }
    h = np.zeros((batch, n), dtype=dtype)
    c = np.zeros((batch, n), dtype=dtype)
    for s, t in enumerate(order):
        z = xw[:, t, :] + h @ w_hh
        i = expit(z[:, 0:n])
        f = expit(z[:, n : 2 * n])
        g = np.tanh(z[:, 2 * n : 3 * n])
        o = expit(z[:, 3 * n :])
        c = f * c + i * g
        tc = np.tanh(c)
        h = o * tc
        for name, value in (("i", i), ("f", f), ("g", g), ("o", o), ("c", c), ("tc", tc), ("h", h)):
            cache[name][s] = value
    return cache


def lstm_seq(x: Tensor, params: LstmParams, reverse: bool = False) -> Tensor:
    """
    Run an LSTM over x (B x T x F) from zero state.

    Returns hidden states (B x T x H) aligned with the input time axis;
    reverse=True processes time from last to first. A 2-D input (T x F)
    is treated as a batch of one.
    """
    params.validate()
    if x.ndim == 2:
        out = lstm_seq(ops.reshape(x, (1, *x.shape)), params, reverse=reverse)
        return ops.reshape(out, out.shape[1:])
    if x.ndim != 3 or x.shape[2] != params.features:
        raise ShapeMismatchError("lstm_seq", [x.shape, params.w_ih.shape])

    batch, steps, features = x.shape
    n = params.hidden
    order = list(range(steps - 1, -1, -1)) if reverse else list(range(steps))
    w_ih, w_hh = params.w_ih.data, params.w_hh.data
    xw = np.matmul(x.data, w_ih) + params.bias.data
    cache = _run_forward(xw, w_hh, n, order)

    out = np.empty((batch, steps, n), dtype=xw.dtype)
    out[:, order, :] = np.transpose(cache["h"], (1, 0, 2))

    def pullback(grad: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        dz_all = np.zeros((batch, steps, 4 * n), dtype=grad.dtype)
        gw_hh = np.zeros_like(w_hh)
        dh_next = np.zeros((batch, n), dtype=grad.dtype)
        dc_next = np.zeros((batch, n), dtype=grad.dtype)
        for s in range(steps - 1, -1, -1):
            t = order[s]
            i, f, g, o = cache["i"][s], cache["f"][s], cache["g"][s], cache["o"][s]
            tc = cache["tc"][s]
            c_prev = cache["c"][s - 1] if s > 0 else np.zeros_like(tc)
            h_prev = cache["h"][s - 1] if s > 0 else np.zeros_like(tc)

            dh = grad[:, t, :] + dh_next
            dc = dh * o * (1.0 - tc * tc) + dc_next
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * c_prev * f * (1.0 - f),
                    dc * i * (1.0 - g * g),
                    dh * tc * o * (1.0 - o),
                ],
                axis=1,
            )
            dz_all[:, t, :] = dz
            gw_hh += h_prev.T @ dz
            dh_next = dz @ w_hh.T
            dc_next = dc * f

        gx = np.matmul(dz_all, w_ih.T)
        gw_ih = x.data.reshape(-1, features).T @ dz_all.reshape(-1, 4 * n)
        gb = dz_all.sum(axis=(0, 1))
        return gx, gw_ih, gw_hh, gb

    return record(
        "lstm_seq", out, (x, params.w_ih, params.w_hh, params.bias), pullback
    )


def bilstm_seq(x: Tensor, forward: LstmParams, backward: Optional[LstmParams] = None) -> Tensor:
    """Forward LSTM, or forward and backward outputs concatenated on features."""
    out = lstm_seq(x, forward)
    if backward is None:
        return out
    return ops.concat([out, lstm_seq(x, backward, reverse=True)], axis=-1)
