""" denoise_pretrain.graph.batch

    PURPOSE:
        - pack several RadiusGraphs into one disjoint-union graph

    BEHAVIOR:
        - vertex indices of graph k are shifted by the vertex count of graphs
          0..k-1; graph_id records which graph owns each vertex

    PUBLIC:
        - GraphBatch
        - batch_graphs(graphs) -> GraphBatch
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.graph.radius import RadiusGraph


@dataclass(frozen=True, eq=False)
class GraphBatch:
    atomic_numbers: np.ndarray
    senders: np.ndarray
    receivers: np.ndarray
    displacement: np.ndarray
    edge_feat: np.ndarray
    graph_id: np.ndarray
    n_node: np.ndarray
    n_edge: np.ndarray

    @property
    def n_graphs(self) -> int:
        return int(self.n_node.size)

    @property
    def n_vertices(self) -> int:
        return int(self.atomic_numbers.size)

    @property
    def n_edges(self) -> int:
        return int(self.senders.size)

    def vertex_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.n_node)[:-1]]).astype(np.int64)


def batch_graphs(graphs: Sequence[RadiusGraph]) -> GraphBatch:
    if not graphs:
        raise ContractViolation("cannot batch zero graphs")
    widths = {g.edge_feat.shape[1] for g in graphs}
    if len(widths) != 1:
        raise ContractViolation(f"edge feature widths differ across graphs: {sorted(widths)}")
    n_node = np.array([g.n_vertices for g in graphs], dtype=np.int64)
    n_edge = np.array([g.n_edges for g in graphs], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(n_node)[:-1]])
    return GraphBatch(
        atomic_numbers=np.concatenate([g.atomic_numbers for g in graphs]),
        senders=np.concatenate([g.senders + o for g, o in zip(graphs, offsets)]).astype(np.int64),
        receivers=np.concatenate([g.receivers + o for g, o in zip(graphs, offsets)]).astype(np.int64),
        displacement=np.concatenate([g.displacement for g in graphs]).reshape(-1, 3),
        edge_feat=np.concatenate([g.edge_feat for g in graphs]).reshape(-1, widths.pop()),
        graph_id=np.repeat(np.arange(len(graphs), dtype=np.int64), n_node),
        n_node=n_node,
        n_edge=n_edge,
    )
