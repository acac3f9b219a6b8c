""" denoise_pretrain.neural.gns

    PURPOSE:
        - encoder / processor / decoder graph network in two variants

    BEHAVIOR:
        - encoder: atom embedding rows (mask token for masked atoms) and a
          layer-normed linear map of the featurized edge distances
        - processor: n_mp_layers interaction-network steps, repeated
          n_block_iterations times with the same parameters; each block's
          output is decoded
        - gns: edge/vertex MLPs followed by layer norm, residual old + new,
          shifted softplus activations
        - gns_tat: layer norm on each MLP input block before the first
          linear layer, Edge-Delta init, tailored leaky ReLUs, weighted
          shortcut w * old + sqrt(1 - w^2) * new, mean decoder aggregation
        - incoming edges are summed per receiver
        - the noise head is a per-vertex MLP; with noise_readout=directional it
          also sums edge scalars times unit displacements per receiver, so the
          predicted noise turns with the input while every latent stays invariant

    PUBLIC:
        - GraphState
        - Prediction
        - edge_update / vertex_update / processor_step
        - unit_directions / directional_noise
        - decode_vertex / graph_readout_input / decode_graph
        - GraphNetSimulator
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.domain.elements import N_ELEMENTS
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.graph.batch import GraphBatch
from denoise_pretrain.graph.embed import embed_atoms_masked
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.mlp import (
    Activation,
    apply_linear,
    apply_mlp,
    apply_norm,
    init_linear,
    init_mlp,
    init_norm,
)
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.neural.tat import TailoredActivation, edge_delta_init, solve_tat_slope
from denoise_pretrain.tensor import Tensor
from denoise_pretrain.tensor import ops

LOGGER = logging.getLogger(__name__)

Params = Mapping[str, Tensor]

TAT_EDGE_NORMS = ("norm_edge", "norm_sender", "norm_receiver")
TAT_VERTEX_NORMS = ("norm_vertex", "norm_aggregate")


@dataclass(frozen=True)
class GraphState:
    vertex: Tensor
    edge: Tensor
    senders: np.ndarray
    receivers: np.ndarray
    graph_id: np.ndarray
    n_graphs: int
    direction: np.ndarray | None = None

    def replace(self, vertex: Tensor, edge: Tensor) -> "GraphState":
        return GraphState(
            vertex, edge, self.senders, self.receivers, self.graph_id, self.n_graphs, self.direction
        )


@dataclass(frozen=True)
class Prediction:
    noise: Tensor
    type_logits: Tensor
    graph: Tensor
    state: GraphState


def unit_directions(batch: GraphBatch) -> np.ndarray:
    """ receiver-minus-sender unit vectors; coincident endpoints give the zero vector """
    displacement = np.asarray(batch.displacement, dtype=np.float64).reshape(-1, 3)
    length = np.linalg.norm(displacement, axis=1, keepdims=True)
    return np.divide(displacement, length, out=np.zeros_like(displacement), where=length > 0.0)


def _shortcut(old: Tensor, new: Tensor, config: GNSConfig) -> Tensor:
    if config.is_tat:
        w = config.shortcut_weight
        return ops.add(ops.affine(old, w, 0.0), ops.affine(new, float(np.sqrt(1.0 - w * w)), 0.0))
    return ops.add(old, new)


def edge_update(
    edge_feat: Tensor,
    sender_feat: Tensor,
    receiver_feat: Tensor,
    params: Params,
    prefix: str,
    config: GNSConfig,
    activation: Activation,
    trace: list[np.ndarray] | None = None,
) -> Tensor:
    if not edge_feat.shape == sender_feat.shape == receiver_feat.shape:
        raise ContractViolation(
            f"edge_update: edge {edge_feat.shape}, sender {sender_feat.shape}, receiver {receiver_feat.shape}"
        )
    if config.is_tat:
        blocks = [
            apply_norm(params, prefix, x, part)
            for x, part in zip((edge_feat, sender_feat, receiver_feat), TAT_EDGE_NORMS)
        ]
        return apply_mlp(params, prefix, ops.concat(blocks), config.mlp_layers, activation, trace)
    hidden = apply_mlp(
        params,
        prefix,
        ops.concat([edge_feat, sender_feat, receiver_feat]),
        config.mlp_layers,
        activation,
        trace,
    )
    return apply_norm(params, prefix, hidden)


def vertex_update(
    vertex_feat: Tensor,
    aggregated: Tensor,
    params: Params,
    prefix: str,
    config: GNSConfig,
    activation: Activation,
) -> Tensor:
    if vertex_feat.shape != aggregated.shape:
        raise ContractViolation(f"vertex_update: {vertex_feat.shape} vs {aggregated.shape}")
    if config.is_tat:
        blocks = [
            apply_norm(params, prefix, x, part)
            for x, part in zip((vertex_feat, aggregated), TAT_VERTEX_NORMS)
        ]
        return apply_mlp(params, prefix, ops.concat(blocks), config.mlp_layers, activation)
    hidden = apply_mlp(params, prefix, ops.concat([vertex_feat, aggregated]), config.mlp_layers, activation)
    return apply_norm(params, prefix, hidden)


def processor_step(
    state: GraphState,
    params: Params,
    step: int,
    config: GNSConfig,
    activation: Activation,
    trace: list[np.ndarray] | None = None,
) -> GraphState:
    """ one interaction network plus the variant's shortcut """
    n_vertices = state.vertex.shape[0]
    new_edge = edge_update(
        state.edge,
        ops.gather(state.vertex, state.senders),
        ops.gather(state.vertex, state.receivers),
        params,
        layout.edge_mlp(step),
        config,
        activation,
        trace,
    )
    incoming = ops.segment_sum(new_edge, state.receivers, n_vertices)
    new_vertex = vertex_update(state.vertex, incoming, params, layout.vertex_mlp(step), config, activation)
    return state.replace(
        vertex=_shortcut(state.vertex, new_vertex, config),
        edge=_shortcut(state.edge, new_edge, config),
    )


def decode_vertex(
    state: GraphState,
    params: Params,
    config: GNSConfig,
    activation: Activation,
) -> tuple[Tensor, Tensor]:
    """
    per-vertex noise (N x 3) and atom-type logits (N x 118).

    with noise_readout=directional the noise adds, per receiver, the sum of
    a learned edge scalar times the unit displacement of each incoming edge.
    """
    n = config.decoder_mlp_layers
    noise = apply_mlp(params, layout.NOISE_HEAD, state.vertex, n, activation)
    if config.noise_readout == "directional":
        noise = ops.add(noise, directional_noise(state, params, config, activation))
    logits = apply_mlp(params, layout.TYPE_HEAD, state.vertex, n, activation)
    return noise, logits


def directional_noise(
    state: GraphState,
    params: Params,
    config: GNSConfig,
    activation: Activation,
) -> Tensor:
    if state.direction is None:
        raise ContractViolation("directional noise readout needs edge directions in the graph state")
    weight = apply_mlp(params, layout.NOISE_EDGE_HEAD, state.edge, config.decoder_mlp_layers, activation)
    along = ops.mul(ops.concat([weight, weight, weight]), Tensor(state.direction.astype(weight.dtype, copy=False)))
    return ops.segment_sum(along, state.receivers, state.vertex.shape[0])


def graph_readout_input(
    state: GraphState,
    params: Params,
    config: GNSConfig,
    activation: Activation,
) -> Tensor:
    """ per-vertex MLP aggregated per graph; the input of the readout MLP """
    per_vertex = apply_mlp(params, layout.GRAPH_VERTEX_HEAD, state.vertex, config.decoder_mlp_layers, activation)
    if config.decoder_aggregation == "mean":
        return ops.segment_mean(per_vertex, state.graph_id, state.n_graphs)
    return ops.segment_sum(per_vertex, state.graph_id, state.n_graphs)


def decode_graph(
    state: GraphState,
    params: Params,
    config: GNSConfig,
    activation: Activation,
) -> Tensor:
    pooled = graph_readout_input(state, params, config, activation)
    out = apply_mlp(params, layout.GRAPH_READOUT_HEAD, pooled, config.decoder_mlp_layers, activation)
    return ops.reshape(out, (state.n_graphs,))


class GraphNetSimulator:
    """ parameter layout, initialization and forward pass for one GNSConfig """

    def __init__(self, config: GNSConfig) -> None:
        self.config = config.resolve()
        self.config.validate()
        self.tailored: TailoredActivation | None = None
        if self.config.is_tat:
            self.tailored = solve_tat_slope(self.config)
            LOGGER.info(
                "tailored leaky relu: slope=%.6f scale=%.6f shift=%.6f (eta=%.2f)",
                self.tailored.negative_slope,
                self.tailored.output_scale,
                self.tailored.output_shift,
                self.tailored.eta,
            )

    @property
    def activation(self) -> Activation:
        if self.tailored is not None:
            return self.tailored
        return ops.shifted_softplus

    # parameters

    def init_params(self, rng: np.random.Generator) -> ParamStore:
        c = self.config
        store = ParamStore()
        store.add(layout.EMBEDDING, rng.normal(0.0, 1.0, size=(N_ELEMENTS, c.latent)), "standard_gaussian")
        store.add(layout.MASK_TOKEN, rng.normal(0.0, 1.0, size=c.latent), "standard_gaussian")
        init_linear(store, layout.EDGE_ENCODER, 0, c.n_basis, c.latent, rng)
        init_norm(store, layout.EDGE_ENCODER, c.latent)

        for step in range(c.n_mp_layers):
            edge, vertex = layout.edge_mlp(step), layout.vertex_mlp(step)
            init_mlp(store, edge, 3 * c.latent, c.mlp_hidden, c.mlp_layers, c.latent, rng)
            init_mlp(store, vertex, 2 * c.latent, c.mlp_hidden, c.mlp_layers, c.latent, rng)
            if c.is_tat:
                for part in TAT_EDGE_NORMS:
                    init_norm(store, edge, c.latent, part)
                for part in TAT_VERTEX_NORMS:
                    init_norm(store, vertex, c.latent, part)
            else:
                init_norm(store, edge, c.latent)
                init_norm(store, vertex, c.latent)
        if c.is_tat:
            edge_delta_init(store, c, rng)

        self._init_vertex_heads(store, rng)
        self.init_graph_heads(store, rng)
        return store

    def _init_vertex_heads(self, store: ParamStore, rng: np.random.Generator) -> None:
        c = self.config
        init_mlp(store, layout.NOISE_HEAD, c.latent, c.mlp_hidden, c.decoder_mlp_layers, 3, rng)
        if c.noise_readout == "directional":
            init_mlp(store, layout.NOISE_EDGE_HEAD, c.latent, c.mlp_hidden, c.decoder_mlp_layers, 1, rng)
        init_mlp(store, layout.TYPE_HEAD, c.latent, c.mlp_hidden, c.decoder_mlp_layers, N_ELEMENTS, rng)

    def init_graph_heads(self, store: ParamStore, rng: np.random.Generator) -> None:
        c = self.config
        init_mlp(store, layout.GRAPH_VERTEX_HEAD, c.latent, c.mlp_hidden, c.decoder_mlp_layers, c.latent, rng)
        init_mlp(store, layout.GRAPH_READOUT_HEAD, c.latent, c.mlp_hidden, c.decoder_mlp_layers, 1, rng)

    def reinit_graph_heads(self, store: ParamStore, rng: np.random.Generator) -> ParamStore:
        fresh = ParamStore()
        self.init_graph_heads(fresh, rng)
        for name, value in fresh.items():
            store.set(name, value, fresh.schemes[name])
        return store

    # forward

    def encode(self, batch: GraphBatch, params: Params, mask: np.ndarray | None = None) -> GraphState:
        hidden = np.zeros(batch.n_vertices, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        vertex = embed_atoms_masked(batch.atomic_numbers, params[layout.EMBEDDING], params[layout.MASK_TOKEN], hidden)
        edge_in = Tensor(np.asarray(batch.edge_feat, dtype=params[layout.EMBEDDING].dtype))
        edge = apply_norm(params, layout.EDGE_ENCODER, apply_linear(params, layout.EDGE_ENCODER, 0, edge_in))
        return GraphState(
            vertex, edge, batch.senders, batch.receivers, batch.graph_id, batch.n_graphs, unit_directions(batch)
        )

    def decode(self, state: GraphState, params: Params) -> Prediction:
        noise, logits = decode_vertex(state, params, self.config, self.activation)
        graph = decode_graph(state, params, self.config, self.activation)
        return Prediction(noise=noise, type_logits=logits, graph=graph, state=state)

    def forward(
        self,
        batch: GraphBatch,
        params: Params,
        mask: np.ndarray | None = None,
        trace: list[np.ndarray] | None = None,
    ) -> list[Prediction]:
        """ one Prediction per block iteration; evaluation reads the last """
        state = self.encode(batch, params, mask)
        out: list[Prediction] = []
        for _ in range(self.config.n_block_iterations):
            for step in range(self.config.n_mp_layers):
                state = processor_step(state, params, step, self.config, self.activation, trace)
            out.append(self.decode(state, params))
        return out
