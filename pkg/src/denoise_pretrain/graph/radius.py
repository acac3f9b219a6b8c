""" denoise_pretrain.graph.radius

    PURPOSE:
        - the directed radius graph of one structure

    BEHAVIOR:
        - every ordered pair (i, j), i != j, with |p_j - p_i| < r_cut becomes
          an edge sender i -> receiver j
        - a receiver keeps at most max_edges_per_vertex incoming edges: the
          nearest ones, ties broken by the lower sender index
        - edges are ordered by (receiver, sender) so the result is
          deterministic
        - neighbour search uses scipy's cKDTree

    PUBLIC:
        - RadiusGraph
        - build_graph(structure, r_cut, max_edges_per_vertex, featurizer=None) -> RadiusGraph
        - one_hot_vertices(atomic_numbers) -> (|S|, 118)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from denoise_pretrain.domain.elements import N_ELEMENTS
from denoise_pretrain.domain.structure import Structure
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.graph.featurize import FeaturizerSpec, featurize_distances


@dataclass(frozen=True, eq=False)
class RadiusGraph:
    atomic_numbers: np.ndarray
    senders: np.ndarray
    receivers: np.ndarray
    displacement: np.ndarray
    distances: np.ndarray
    edge_feat: np.ndarray
    vertex_feat: np.ndarray
    graph_id: np.ndarray
    r_cut: float

    @property
    def n_vertices(self) -> int:
        return int(self.atomic_numbers.size)

    @property
    def n_edges(self) -> int:
        return int(self.senders.size)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(s), int(r)) for s, r in zip(self.senders, self.receivers)}

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.receivers, minlength=self.n_vertices)


def one_hot_vertices(atomic_numbers: np.ndarray) -> np.ndarray:
    numbers = np.asarray(atomic_numbers, dtype=np.int64)
    out = np.zeros((numbers.size, N_ELEMENTS), dtype=np.float64)
    out[np.arange(numbers.size), numbers - 1] = 1.0
    return out


def _candidate_pairs(positions: np.ndarray, r_cut: float) -> np.ndarray:
    if positions.shape[0] < 2:
        return np.empty((0, 2), dtype=np.int64)
    tree = cKDTree(positions)
    # widen the query slightly; the strict test happens on our own distances
    pairs = tree.query_pairs(r_cut * (1.0 + 1e-9), output_type="ndarray")
    if pairs.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    return pairs.astype(np.int64)


def build_graph(
    structure: Structure,
    r_cut: float,
    max_edges_per_vertex: int,
    featurizer: FeaturizerSpec | None = None,
    positions: np.ndarray | None = None,
) -> RadiusGraph:
    """
    positions overrides structure.positions (used for corrupted copies)
    """
    if r_cut <= 0:
        raise ContractViolation(f"r_cut must be > 0, got {r_cut}")
    if max_edges_per_vertex < 1:
        raise ContractViolation(f"max_edges_per_vertex must be >= 1, got {max_edges_per_vertex}")
    pos = structure.positions if positions is None else np.asarray(positions, dtype=np.float64)
    if pos.shape != structure.positions.shape:
        raise ContractViolation(f"positions shape {pos.shape} != {structure.positions.shape}")

    pairs = _candidate_pairs(pos, r_cut)
    senders = np.concatenate([pairs[:, 0], pairs[:, 1]])
    receivers = np.concatenate([pairs[:, 1], pairs[:, 0]])
    displacement = pos[receivers] - pos[senders]
    distances = np.linalg.norm(displacement, axis=1)

    keep = distances < r_cut
    senders, receivers = senders[keep], receivers[keep]
    displacement, distances = displacement[keep], distances[keep]

    # nearest-first within each receiver, lower sender wins ties
    order = np.lexsort((senders, distances, receivers))
    senders, receivers = senders[order], receivers[order]
    displacement, distances = displacement[order], distances[order]
    if receivers.size:
        starts = np.flatnonzero(np.r_[True, receivers[1:] != receivers[:-1]])
        group_start = np.repeat(starts, np.diff(np.r_[starts, receivers.size]))
        rank = np.arange(receivers.size) - group_start
        capped = rank < max_edges_per_vertex
        senders, receivers = senders[capped], receivers[capped]
        displacement, distances = displacement[capped], distances[capped]

    final = np.lexsort((senders, receivers))
    senders, receivers = senders[final], receivers[final]
    displacement, distances = displacement[final], distances[final]

    spec = featurizer or FeaturizerSpec(r_cut=r_cut)
    edge_feat = featurize_distances(distances, spec) if distances.size else np.zeros((0, spec.n_basis))

    return RadiusGraph(
        atomic_numbers=structure.atomic_numbers.copy(),
        senders=senders,
        receivers=receivers,
        displacement=displacement,
        distances=distances,
        edge_feat=edge_feat,
        vertex_feat=one_hot_vertices(structure.atomic_numbers),
        graph_id=np.zeros(structure.n_atoms, dtype=np.int64),
        r_cut=float(r_cut),
    )
