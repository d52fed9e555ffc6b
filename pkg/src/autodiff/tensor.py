"""
Tensors and Tapes
=================

Dense tensors with reverse-mode gradients. Operations executed inside a
`with Tape():` block that touch a tensor with requires_grad=True are
recorded in execution order; `Tape.backward` replays them in reverse.

Each tape is bound to the current context (thread), so independent
workers can build and differentiate their own tapes concurrently while
sharing read-only parameters.
"""

from contextvars import ContextVar, Token
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional, Sequence, Union

import numpy as np

from ..errors import ShapeMismatchError, TapeError

Pullback = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_active_tape: ContextVar[Optional["Tape"]] = ContextVar("active_tape", default=None)


# ============================================================
# TENSOR
# ============================================================


class Tensor:
    """Dense float array with optional gradient tracking."""

    __slots__ = ("data", "requires_grad", "grad", "name", "_tape")

    def __init__(self, data: Any, requires_grad: bool = False, name: Optional[str] = None) -> None:
        arr = np.asarray(data)
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float64)
        self.data: np.ndarray = arr
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._tape: Optional["Tape"] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad}{label})"

    # Operators delegate to ops; imported lazily to keep module import acyclic.

    def __add__(self, other: "TensorLike") -> "Tensor":
        from .ops import add

        return add(self, other)

    def __radd__(self, other: "TensorLike") -> "Tensor":
        from .ops import add

        return add(other, self)

    def __sub__(self, other: "TensorLike") -> "Tensor":
        from .ops import sub

        return sub(self, other)

    def __rsub__(self, other: "TensorLike") -> "Tensor":
        from .ops import sub

        return sub(other, self)

    def __mul__(self, other: "TensorLike") -> "Tensor":
        from .ops import mul

        return mul(self, other)

    def __rmul__(self, other: "TensorLike") -> "Tensor":
        from .ops import mul

        return mul(other, self)

    def __truediv__(self, other: "TensorLike") -> "Tensor":
        from .ops import div

        return div(self, other)

    def __rtruediv__(self, other: "TensorLike") -> "Tensor":
        from .ops import div

        return div(other, self)

    def __neg__(self) -> "Tensor":
        from .ops import neg

        return neg(self)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from .ops import matmul

        return matmul(self, other)

    def __getitem__(self, key: Any) -> "Tensor":
        from .ops import index

        return index(self, key)

    @property
    def T(self) -> "Tensor":  # noqa: N802
        from .ops import transpose

        return transpose(self)


TensorLike = Union[Tensor, np.ndarray, float, int]


def as_tensor(x: TensorLike, like: Optional[Tensor] = None) -> Tensor:
    """Wrap constants as non-differentiable tensors in the dtype of `like`."""
    if isinstance(x, Tensor):
        return x
    if like is not None:
        return Tensor(np.asarray(x, dtype=like.dtype))
    return Tensor(x)


# ============================================================
# TAPE
# ============================================================


@dataclass
class TapeEntry:
    """One recorded operation."""

    op: str
    output: Tensor
    inputs: tuple[Tensor, ...]
    pullback: Pullback


class Gradients:
    """Gradients produced by one backward pass, keyed by tensor identity."""

    def __init__(self, by_id: dict[int, np.ndarray], tensors: dict[int, Tensor]) -> None:
        self._by_id = by_id
        self._tensors = tensors

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        grad = self._by_id.get(id(tensor))
        if grad is not None:
            return grad
        if tensor.requires_grad:
            return np.zeros_like(tensor.data)
        raise KeyError(f"{tensor!r} does not require gradients")

    def __contains__(self, tensor: object) -> bool:
        return id(tensor) in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[Tensor]:
        return iter(self._tensors.values())


class Tape:
    """Ordered record of operations for one reverse-mode pass."""

    def __init__(self) -> None:
        self._entries: list[TapeEntry] = []
        self._outputs: set[int] = set()
        self._consumed = False
        self._token: Optional[Token[Optional["Tape"]]] = None

    def __enter__(self) -> "Tape":
        if _active_tape.get() is not None:
            raise TapeError("A tape is already recording in this context")
        self._token = _active_tape.set(self)
        return self

    def __exit__(self, *exc: object) -> None:
        if self._token is not None:
            _active_tape.reset(self._token)
            self._token = None

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def consumed(self) -> bool:
        return self._consumed

    def record(self, op: str, output: Tensor, inputs: tuple[Tensor, ...], pullback: Pullback) -> None:
        if self._consumed:
            raise TapeError("Cannot record on a consumed tape; call reset() first")
        output._tape = self
        self._entries.append(TapeEntry(op=op, output=output, inputs=inputs, pullback=pullback))
        self._outputs.add(id(output))

    def reset(self) -> None:
        """Drop all entries and allow the tape to be reused."""
        self._entries.clear()
        self._outputs.clear()
        self._consumed = False

    def backward(self, loss: Tensor, accumulate: bool = True) -> Gradients:
        """
        Exact reverse-mode gradients of a scalar loss.

        Every entry is visited once in reverse recording order. With
        accumulate=True the gradients of leaf tensors are also added to
        their `.grad` buffers.
        """
        if self._consumed:
            raise TapeError("backward already ran on this tape; call reset() first")
        if loss.size != 1:
            raise TapeError(f"Loss must be a scalar, got shape {loss.shape}")
        if not loss.requires_grad:
            raise TapeError("Loss does not depend on any tensor with requires_grad=True")

        grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
        leaves: dict[int, Tensor] = {}
        if id(loss) not in self._outputs:
            leaves[id(loss)] = loss

        for entry in reversed(self._entries):
            upstream = grads.pop(id(entry.output), None)
            if upstream is None:
                continue
            for inp, grad in zip(entry.inputs, entry.pullback(upstream)):
                if grad is None or not inp.requires_grad:
                    continue
                if grad.shape != inp.shape:
                    raise ShapeMismatchError(f"{entry.op} pullback", [grad.shape, inp.shape])
                key = id(inp)
                grads[key] = grads[key] + grad if key in grads else grad
                if key not in self._outputs:
                    leaves[key] = inp

        self._consumed = True
        self._entries.clear()

        result: dict[int, np.ndarray] = {}
        for key, tensor in leaves.items():
            grad = np.array(grads[key], dtype=tensor.dtype, copy=True)
            result[key] = grad
            if accumulate:
                tensor.grad = grad.copy() if tensor.grad is None else tensor.grad + grad
        return Gradients(result, leaves)


def current_tape() -> Optional[Tape]:
    """The tape recording in this context, if any."""
    return _active_tape.get()


def backward(loss: Tensor) -> Gradients:
    """Run backward on the tape that recorded `loss`."""
    if loss._tape is None:
        raise TapeError("Loss was not computed under a Tape")
    return loss._tape.backward(loss)


def record(op: str, data: np.ndarray, inputs: Sequence[Tensor], pullback: Pullback) -> Tensor:
    """Wrap an op result, recording it when any input needs gradients."""
    tape = _active_tape.get()
    needs_grad = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=needs_grad)
    if needs_grad and tape is not None:
        tape.record(op, out, tuple(inputs), pullback)
    return out


# ============================================================
# SERIALIZATION
# ============================================================


def tensor_to_json(tensor: Tensor) -> dict[str, Any]:
    """Dump as {shape, data} with data flattened in C order."""
    return {"shape": list(tensor.shape), "data": tensor.data.reshape(-1).tolist()}


def tensor_from_json(payload: dict[str, Any], requires_grad: bool = False) -> Tensor:
    shape = tuple(int(s) for s in payload["shape"])
    data = np.asarray(payload["data"], dtype=np.float64)
    if data.size != int(np.prod(shape, dtype=np.int64)):
        raise ShapeMismatchError("tensor_from_json", [shape, data.shape])
    return Tensor(data.reshape(shape), requires_grad=requires_grad)
