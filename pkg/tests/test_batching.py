from __future__ import annotations

from dataclasses import dataclass
from itertools import islice

import numpy as np
import pytest

from denoise_pretrain.bridges.specs.objective import NoiseSpec
from denoise_pretrain.bridges.specs.training import BatchCaps
from denoise_pretrain.domain.synthetic import make_synthetic_dataset
from denoise_pretrain.errors import BatchCapError, ConfigError, ContractViolation
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.graph.radius import build_graph
from denoise_pretrain.training.batching import dynamic_batch, dynamic_batches
from denoise_pretrain.training.prepare import Cursor, PrepSpec, epoch_order, example_stream


@dataclass(frozen=True)
class Counts:
    n_vertices: int
    n_edges: int


def test_random_streams_respect_every_cap():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        caps = BatchCaps(
            max_vertices=int(rng.integers(10, 60)),
            max_edges=int(rng.integers(40, 400)),
            max_graphs=int(rng.integers(1, 9)),
        )
        stream = [
            Counts(int(rng.integers(1, caps.max_vertices + 1)), int(rng.integers(0, caps.max_edges + 1)))
            for _ in range(int(rng.integers(0, 30)))
        ]
        batches = list(dynamic_batch(stream, caps))
        assert [item for batch in batches for item in batch] == stream
        for batch in batches:
            assert 1 <= len(batch) <= caps.max_graphs
            assert sum(item.n_vertices for item in batch) <= caps.max_vertices
            assert sum(item.n_edges for item in batch) <= caps.max_edges


def test_graph_cap_binds_first():
    stream = [Counts(10, 40)] * 20
    sizes = [len(batch) for batch in dynamic_batch(stream, BatchCaps(256, 9216, 8))]
    assert sizes == [8, 8, 4]


def test_vertex_cap_closes_the_batch():
    stream = [Counts(100, 1)] * 5
    assert [len(b) for b in dynamic_batch(stream, BatchCaps(256, 9216, 8))] == [2, 2, 1]


@pytest.mark.parametrize(
    "item, cap",
    [(Counts(300, 1), "max_vertices_in_batch"), (Counts(5, 10_000), "max_edges_in_batch")],
)
def test_oversized_graph_names_its_cap(item, cap):
    with pytest.raises(BatchCapError) as info:
        list(dynamic_batch([Counts(1, 0), item], BatchCaps()))
    assert info.value.cap == cap


def test_caps_are_validated():
    with pytest.raises(ConfigError):
        BatchCaps.from_mapping({"max_graphs_in_batch": 0})


def test_real_graphs_batch_under_caps(small_dataset):
    graphs = [build_graph(s, 3.0, 8) for s in small_dataset]
    caps = BatchCaps(max_vertices=40, max_edges=300, max_graphs=4)
    batches = list(dynamic_batches(graphs, caps))
    assert sum(b.n_graphs for b in batches) == len(graphs)
    for batch in batches:
        assert batch.n_vertices <= 40 and batch.n_edges <= 300 and batch.n_graphs <= 4


def test_epoch_order_is_a_seeded_permutation():
    order = epoch_order(10, 3, 0)
    assert sorted(order.tolist()) == list(range(10))
    assert np.array_equal(order, epoch_order(10, 3, 0))
    assert not np.array_equal(order, epoch_order(10, 3, 1))


def _spec() -> PrepSpec:
    return PrepSpec(
        featurizer=FeaturizerSpec(n_basis=4, r_cut=3.0),
        max_edges_per_vertex=8,
        noise=NoiseSpec(sigma=0.05),
        mask_prob=0.5,
        seed=11,
    )


def _key(example) -> tuple:
    return example.index, example.target.tobytes(), example.mask.tobytes(), example.graph.senders.tobytes()


def test_stream_is_independent_of_thread_count():
    dataset = make_synthetic_dataset(6, seed=2)
    one = [_key(e) for e in islice(example_stream(dataset, _spec(), threads=1), 15)]
    many = [_key(e) for e in islice(example_stream(dataset, _spec(), threads=3), 15)]
    assert one == many
    assert sorted(index for index, *_ in one[:6]) == list(range(6))


def test_stream_restarts_at_a_cursor():
    dataset = make_synthetic_dataset(6, seed=2)
    full = list(islice(example_stream(dataset, _spec()), 14))
    cursor = full[8].after
    assert cursor == Cursor(epoch=1, position=3)
    resumed = [_key(e) for e in islice(example_stream(dataset, _spec(), start=cursor), 5)]
    assert resumed == [_key(e) for e in full[9:14]]


def test_empty_dataset_stream_is_rejected():
    dataset = make_synthetic_dataset(1, seed=0).subset([])
    with pytest.raises(ContractViolation):
        next(example_stream(dataset, _spec()))
