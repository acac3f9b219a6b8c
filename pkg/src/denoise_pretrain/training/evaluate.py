""" denoise_pretrain.training.evaluate

    PURPOSE:
        - graph-level predictions and MAE with a fixed set of weights
          (the EMA shadow during training)

    BEHAVIOR:
        - clean positions, no mask, no tape
        - the last block iteration's graph output is the prediction
        - standardized predictions are mapped back to label units before
          the error is taken

    PUBLIC:
        - predict_labels(model, store, dataset, featurizer, caps, max_edges_per_vertex, stats) -> ndarray
        - mean_absolute_error(model, store, dataset, label, ...) -> float
"""

from __future__ import annotations

import numpy as np

from denoise_pretrain.bridges.specs.training import BatchCaps
from denoise_pretrain.domain.structure import Dataset, LabelStats
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.graph.radius import build_graph
from denoise_pretrain.neural.gns import GraphNetSimulator
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.training.batching import dynamic_batches


def predict_labels(
    model: GraphNetSimulator,
    store: ParamStore,
    dataset: Dataset,
    featurizer: FeaturizerSpec,
    caps: BatchCaps,
    max_edges_per_vertex: int,
    stats: LabelStats | None = None,
) -> np.ndarray:
    if len(dataset) == 0:
        raise ContractViolation(f"cannot evaluate on empty dataset {dataset.name!r}")
    params = store.constants()
    graphs = (build_graph(s, featurizer.r_cut, max_edges_per_vertex, featurizer) for s in dataset)
    out = [model.forward(batch, params)[-1].graph.numpy() for batch in dynamic_batches(graphs, caps)]
    values = np.concatenate(out)
    return stats.restore(values) if stats is not None else values


def mean_absolute_error(
    model: GraphNetSimulator,
    store: ParamStore,
    dataset: Dataset,
    label: str,
    featurizer: FeaturizerSpec,
    caps: BatchCaps,
    max_edges_per_vertex: int,
    stats: LabelStats | None = None,
) -> float:
    truth = dataset.label_values(label)
    pred = predict_labels(model, store, dataset, featurizer, caps, max_edges_per_vertex, stats)
    return float(np.mean(np.abs(pred - truth)))
