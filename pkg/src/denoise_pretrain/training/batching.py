""" denoise_pretrain.training.batching

    PURPOSE:
        - group a stream of graphs into batches under vertex/edge/graph caps

    BEHAVIOR:
        - greedy in stream order: a graph that would push the open batch
          past any cap closes it and starts the next one
        - each input graph lands in exactly one batch; concatenating the
          batches in order gives back the stream
        - a single graph over a cap is an error naming that cap

    PUBLIC:
        - BatchCaps (re-exported)
        - check_fits(graph, caps)
        - dynamic_batch(items, caps) -> Iterator[list[item]]
        - dynamic_batches(graphs, caps) -> Iterator[GraphBatch]
"""

from __future__ import annotations

from typing import Iterable, Iterator, Protocol, TypeVar

from denoise_pretrain.bridges.specs.training import BatchCaps
from denoise_pretrain.errors import BatchCapError
from denoise_pretrain.graph.batch import GraphBatch, batch_graphs
from denoise_pretrain.graph.radius import RadiusGraph

__all__ = ["BatchCaps", "check_fits", "dynamic_batch", "dynamic_batches"]


class Counted(Protocol):
    @property
    def n_vertices(self) -> int: ...

    @property
    def n_edges(self) -> int: ...


Item = TypeVar("Item", bound=Counted)


def check_fits(graph: Counted, caps: BatchCaps) -> None:
    if graph.n_vertices > caps.max_vertices:
        raise BatchCapError("max_vertices_in_batch", caps.max_vertices, graph.n_vertices)
    if graph.n_edges > caps.max_edges:
        raise BatchCapError("max_edges_in_batch", caps.max_edges, graph.n_edges)


def dynamic_batch(graphs: Iterable[Item], caps: BatchCaps) -> Iterator[list[Item]]:
    """ anything exposing n_vertices and n_edges can be batched """
    current: list[Item] = []
    vertices = edges = 0
    for graph in graphs:
        check_fits(graph, caps)
        over = (
            len(current) + 1 > caps.max_graphs
            or vertices + graph.n_vertices > caps.max_vertices
            or edges + graph.n_edges > caps.max_edges
        )
        if current and over:
            yield current
            current, vertices, edges = [], 0, 0
        current.append(graph)
        vertices += graph.n_vertices
        edges += graph.n_edges
    if current:
        yield current


def dynamic_batches(graphs: Iterable[RadiusGraph], caps: BatchCaps) -> Iterator[GraphBatch]:
    for group in dynamic_batch(graphs, caps):
        yield batch_graphs(group)
