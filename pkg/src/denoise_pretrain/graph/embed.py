""" denoise_pretrain.graph.embed

    learnable atom-type embedding lookups on the tape

    PUBLIC:
        - embed_atoms(atomic_numbers, table) -> Tensor
        - embed_atoms_masked(atomic_numbers, table, mask_token, mask) -> Tensor
"""

from __future__ import annotations

import numpy as np

from denoise_pretrain.domain.elements import N_ELEMENTS
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.tensor import Tensor
from denoise_pretrain.tensor import ops


def _rows(atomic_numbers: np.ndarray, table: Tensor) -> np.ndarray:
    numbers = np.asarray(atomic_numbers, dtype=np.int64).reshape(-1)
    if numbers.size and (numbers.min() < 1 or numbers.max() > N_ELEMENTS):
        raise ContractViolation(f"atomic numbers must lie in [1, {N_ELEMENTS}]")
    if table.ndim != 2 or table.shape[0] != N_ELEMENTS:
        raise ContractViolation(f"embedding table must be {N_ELEMENTS} x F, got {table.shape}")
    return numbers - 1


def embed_atoms(atomic_numbers: np.ndarray, table: Tensor) -> Tensor:
    return ops.gather(table, _rows(atomic_numbers, table))


def embed_atoms_masked(
    atomic_numbers: np.ndarray,
    table: Tensor,
    mask_token: Tensor,
    mask: np.ndarray,
) -> Tensor:
    """ masked atoms read the mask-token row instead of their element row """
    rows = _rows(atomic_numbers, table)
    hidden = np.asarray(mask, dtype=bool).reshape(-1)
    if hidden.shape != rows.shape:
        raise ContractViolation("mask must hold one flag per atom")
    if mask_token.shape != (table.shape[1],):
        raise ContractViolation(f"mask token shape {mask_token.shape} != ({table.shape[1]},)")
    if not hidden.any():
        return ops.gather(table, rows)
    extended = ops.concat([table, ops.reshape(mask_token, (1, table.shape[1]))], axis=0)
    return ops.gather(extended, np.where(hidden, N_ELEMENTS, rows))
