"""
Gradient Checking
=================

Central finite differences against tape gradients.
"""

from typing import Callable, Optional

import numpy as np

from ..observability import get_logger
from .tensor import Tape, Tensor

logger = get_logger(__name__)

RELATIVE_FLOOR = 1e-8


def grad_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor,
    h: float = 1e-5,
    max_entries: Optional[int] = None,
    seed: int = 0,
) -> float:
    """
    Maximum relative error between analytic and numeric gradients.

    `f` maps x to a scalar tensor and may close over other tensors. x is
    perturbed in place and restored. With max_entries set, a seeded random
    subset of entries is checked.
    """
    if x.dtype != np.float64:
        logger.warning("Gradient check on non-float64 tensor", dtype=str(x.dtype))
    was_tracked = x.requires_grad
    x.requires_grad = True
    try:
        with Tape() as tape:
            loss = f(x)
            analytic = tape.backward(loss, accumulate=False)[x].reshape(-1)
    finally:
        x.requires_grad = was_tracked

    entries = np.arange(x.size)
    if max_entries is not None and max_entries < x.size:
        entries = np.random.default_rng(seed).choice(x.size, size=max_entries, replace=False)

    if not x.data.flags.c_contiguous:
        x.data = np.ascontiguousarray(x.data)
    flat = x.data.reshape(-1)
    worst = 0.0
    for idx in entries:
        original = flat[idx]
        flat[idx] = original + h
        plus = f(x).item()
        flat[idx] = original - h
        minus = f(x).item()
        flat[idx] = original
        numeric = (plus - minus) / (2.0 * h)
        scale = max(abs(analytic[idx]), abs(numeric), RELATIVE_FLOOR)
        worst = max(worst, abs(analytic[idx] - numeric) / scale)
    return float(worst)
