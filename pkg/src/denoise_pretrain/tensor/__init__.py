""" denoise_pretrain.tensor

    dense tensors with reverse-mode differentiation on numpy arrays

"""

from __future__ import annotations

from .tape import DEFAULT_DTYPE, OpRecord, Tape, Tensor, constant, grad

__all__ = ["DEFAULT_DTYPE", "OpRecord", "Tape", "Tensor", "constant", "grad"]
