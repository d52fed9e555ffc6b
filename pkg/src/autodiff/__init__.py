"""
Tensor Autodiff
===============

Reverse-mode automatic differentiation over numpy arrays: tensors, tapes,
primitives, convolutions, LSTMs and gradient checking.
"""

from . import ops
from .conv import conv1d, conv_transpose1d, fold, num_chunks, unfold
from .gradcheck import grad_check
from .recurrent import LstmParams, bilstm_seq, lstm_cell, lstm_seq
from .tensor import (
    Gradients,
    Tape,
    Tensor,
    as_tensor,
    backward,
    current_tape,
    tensor_from_json,
    tensor_to_json,
)

__all__ = [
    "Gradients",
    "LstmParams",
    "Tape",
    "Tensor",
    "as_tensor",
    "backward",
    "bilstm_seq",
    "conv1d",
    "conv_transpose1d",
    "current_tape",
    "fold",
    "grad_check",
    "lstm_cell",
    "lstm_seq",
    "num_chunks",
    "ops",
    "tensor_from_json",
    "tensor_to_json",
    "unfold",
]
