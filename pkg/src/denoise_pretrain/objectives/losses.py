""" denoise_pretrain.objectives.losses

    PURPOSE:
        - the scalar training objectives, written in tape ops

    BEHAVIOR:
        - denoising_loss: squared error summed over the three coordinates,
          averaged over the atoms of each structure, then over structures
        - masked_type_loss: cross entropy of the atom-type logits, averaged
          over masked atoms only (zero when nothing is masked)
        - target_loss: mean squared error of the per-graph scalar
        - noisy_nodes_loss: weighted sum of the three; zero-weight terms are
          skipped and reported as 0

    PUBLIC:
        - LossTerms
        - denoising_loss(pred, target, graph_id=None, n_graphs=1) -> Tensor
        - masked_type_loss(logits, atomic_numbers, mask) -> Tensor
        - target_loss(pred, target) -> Tensor
        - noisy_nodes_loss(...) -> LossTerms
        - mean_of(losses) -> Tensor
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from denoise_pretrain.bridges.specs.objective import LossWeights
from denoise_pretrain.domain.elements import N_ELEMENTS
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.tensor import Tensor
from denoise_pretrain.tensor import ops


def _const(value: np.ndarray | Tensor, like: Tensor) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=like.dtype))


def denoising_loss(
    pred: Tensor,
    target: np.ndarray | Tensor,
    graph_id: np.ndarray | None = None,
    n_graphs: int = 1,
) -> Tensor:
    goal = _const(target, pred)
    if pred.shape != goal.shape or pred.ndim != 2 or pred.shape[1] != 3:
        raise ContractViolation(f"denoising_loss: pred {pred.shape} vs target {goal.shape}")
    per_atom = ops.reduce_sum(ops.square(ops.sub(pred, goal)), axis=1)
    ids = np.zeros(pred.shape[0], dtype=np.int64) if graph_id is None else np.asarray(graph_id)
    per_graph = ops.segment_mean(per_atom, ids, n_graphs)
    return ops.reduce_mean(per_graph)


def masked_type_loss(logits: Tensor, atomic_numbers: np.ndarray, mask: np.ndarray) -> Tensor:
    hidden = np.asarray(mask, dtype=bool).reshape(-1)
    numbers = np.asarray(atomic_numbers, dtype=np.int64).reshape(-1)
    if logits.shape != (numbers.size, N_ELEMENTS) or hidden.size != numbers.size:
        raise ContractViolation(f"masked_type_loss: logits {logits.shape} for {numbers.size} atoms")
    n_masked = int(hidden.sum())
    if n_masked == 0:
        return Tensor(np.zeros((), dtype=logits.dtype))
    pick = np.zeros(logits.shape, dtype=logits.dtype)
    rows = np.flatnonzero(hidden)
    pick[rows, numbers[rows] - 1] = 1.0
    picked = ops.reduce_sum(ops.mul(ops.log_softmax(logits), Tensor(pick)))
    return ops.affine(picked, -1.0 / n_masked, 0.0)


def target_loss(pred: Tensor, target: np.ndarray | Tensor) -> Tensor:
    goal = _const(target, pred)
    if pred.shape != goal.shape:
        raise ContractViolation(f"target_loss: pred {pred.shape} vs target {goal.shape}")
    return ops.reduce_mean(ops.square(ops.sub(pred, goal)))


@dataclass(frozen=True)
class LossTerms:
    total: Tensor
    position: float
    atom_type: float
    target: float


def noisy_nodes_loss(
    graph_pred: Tensor,
    graph_target: np.ndarray | None,
    vertex_pred: Tensor,
    eps: np.ndarray,
    type_logits: Tensor,
    masked_types: tuple[np.ndarray, np.ndarray],
    w: LossWeights,
    graph_id: np.ndarray | None = None,
    n_graphs: int = 1,
) -> LossTerms:
    """ target_coeff * MSE + position_coeff * denoising + atom_type_coeff * masked CE """
    zero = Tensor(np.zeros((), dtype=vertex_pred.dtype))
    parts: list[Tensor] = []
    values = {"position": 0.0, "atom_type": 0.0, "target": 0.0}

    if w.position_coeff > 0:
        term = denoising_loss(vertex_pred, eps, graph_id, n_graphs)
        values["position"] = term.item()
        parts.append(ops.affine(term, w.position_coeff, 0.0))
    if w.atom_type_coeff > 0:
        numbers, mask = masked_types
        term = masked_type_loss(type_logits, numbers, mask)
        values["atom_type"] = term.item()
        parts.append(ops.affine(term, w.atom_type_coeff, 0.0))
    if w.target_coeff > 0:
        if graph_target is None:
            raise ContractViolation("target_loss_coefficient > 0 needs graph targets")
        term = target_loss(graph_pred, graph_target)
        values["target"] = term.item()
        parts.append(ops.affine(term, w.target_coeff, 0.0))

    total = zero
    for part in parts:
        total = ops.add(total, part)
    return LossTerms(total=total, **values)


def mean_of(losses: Sequence[Tensor]) -> Tensor:
    """ average of per-block-iteration losses """
    if not losses:
        raise ContractViolation("no losses to average")
    total = losses[0]
    for loss in losses[1:]:
        total = ops.add(total, loss)
    return ops.affine(total, 1.0 / len(losses), 0.0)
