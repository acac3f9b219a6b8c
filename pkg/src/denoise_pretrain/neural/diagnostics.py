""" denoise_pretrain.neural.diagnostics

    PURPOSE:
        - initialization-time measurements of an untrained network

    BEHAVIOR:
        - oversmoothing_profile: mean pairwise cosine similarity of vertex
          features within each graph, after the encoder and after every
          message-passing step
        - edge_network_profile: q and c values at the output of every linear
          layer along the edge residual path, fed with explicit edge vectors
          and zero vertex features

    PUBLIC:
        - mean_pairwise_cosine(features, graph_id) -> float
        - oversmoothing_profile(model, store, batch, depth) -> list[float]
        - edge_network_profile(model, store, edge_inputs) -> list[QCState]
"""

from __future__ import annotations

import numpy as np

from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.graph.batch import GraphBatch
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.gns import GraphNetSimulator, edge_update, processor_step
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.neural.tat import QCState
from denoise_pretrain.tensor import Tensor
from denoise_pretrain.tensor import ops


def _pair_cosines(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    unit = np.divide(rows, norms, out=np.zeros_like(rows), where=norms > 1e-300)
    sims = unit @ unit.T
    upper = np.triu_indices(rows.shape[0], k=1)
    return np.clip(sims[upper], -1.0, 1.0)


def mean_pairwise_cosine(features: np.ndarray, graph_id: np.ndarray) -> float:
    """ mean over vertex pairs inside the same graph; single-vertex graphs are skipped """
    sims: list[np.ndarray] = []
    for g in np.unique(graph_id):
        rows = features[graph_id == g]
        if rows.shape[0] >= 2:
            sims.append(_pair_cosines(rows))
    if not sims:
        raise ContractViolation("oversmoothing needs at least one graph with two vertices")
    return float(np.concatenate(sims).mean())


def oversmoothing_profile(
    model: GraphNetSimulator,
    store: ParamStore,
    batch: GraphBatch,
    depth: int,
) -> list[float]:
    """ entry t is the similarity after t message-passing steps (t = 0 is the encoder) """
    params = store.constants()
    state = model.encode(batch, params)
    profile = [mean_pairwise_cosine(state.vertex.data, batch.graph_id)]
    for t in range(depth):
        step = t % model.config.n_mp_layers
        state = processor_step(state, params, step, model.config, model.activation)
        profile.append(mean_pairwise_cosine(state.vertex.data, batch.graph_id))
    return profile


def _qc(rows: np.ndarray) -> QCState:
    q = float(np.mean(np.sum(rows * rows, axis=1) / rows.shape[1]))
    c = float(_pair_cosines(rows).mean()) if rows.shape[0] >= 2 else 1.0
    return QCState(q=q, c=c)


def edge_network_profile(
    model: GraphNetSimulator,
    store: ParamStore,
    edge_inputs: np.ndarray,
) -> list[QCState]:
    """ q/c at every linear-layer output of the edge path, all blocks in order """
    config = model.config
    inputs = np.asarray(edge_inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != config.latent:
        raise ContractViolation(f"edge inputs must be k x {config.latent}, got {inputs.shape}")
    params = store.constants()
    zeros = Tensor(np.zeros_like(inputs))
    edge = Tensor(inputs)
    trace: list[np.ndarray] = []
    w = config.shortcut_weight
    for _ in range(config.n_block_iterations):
        for step in range(config.n_mp_layers):
            branch = edge_update(
                edge, zeros, zeros, params, layout.edge_mlp(step), config, model.activation, trace
            )
            if config.is_tat:
                edge = ops.add(ops.affine(edge, w, 0.0), ops.affine(branch, float(np.sqrt(1.0 - w * w)), 0.0))
            else:
                edge = ops.add(edge, branch)
    trace.append(edge.data)
    return [_qc(rows) for rows in trace]
