from __future__ import annotations

import numpy as np
import pytest

from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.domain.structure import Dataset, Structure
from denoise_pretrain.domain.synthetic import make_synthetic_dataset
from denoise_pretrain.graph.batch import GraphBatch, batch_graphs
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.graph.radius import build_graph

R_CUT = 4.0
MAX_EPV = 20


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture
def featurizer() -> FeaturizerSpec:
    return FeaturizerSpec(n_basis=4, r_cut=R_CUT)


@pytest.fixture
def gns_config() -> GNSConfig:
    return GNSConfig(
        n_mp_layers=2,
        n_block_iterations=2,
        latent=8,
        mlp_hidden=12,
        mlp_layers=2,
        n_basis=4,
        variant="gns",
    )


@pytest.fixture
def tat_config() -> GNSConfig:
    # 3 blocks x 3 layers brackets eta = 0.2 (C_net(0) is about 0.297 at slope 0)
    return GNSConfig(
        n_mp_layers=3,
        n_block_iterations=1,
        latent=8,
        mlp_hidden=12,
        mlp_layers=3,
        n_basis=4,
        variant="gns_tat",
        tat_eta=0.2,
    )


@pytest.fixture(scope="session")
def small_dataset() -> Dataset:
    return make_synthetic_dataset(10, seed=0)


@pytest.fixture
def water_like() -> Structure:
    return Structure(
        atomic_numbers=np.array([8, 1, 1, 6]),
        positions=np.array(
            [
                [0.0, 0.0, 0.0],
                [0.96, 0.0, 0.0],
                [-0.24, 0.93, 0.0],
                [0.3, -0.5, 1.4],
            ]
        ),
        labels={"surrogate_energy": -1.25},
    )


def make_batch(structures: list[Structure], featurizer: FeaturizerSpec) -> GraphBatch:
    graphs = [build_graph(s, featurizer.r_cut, MAX_EPV, featurizer) for s in structures]
    return batch_graphs(graphs)
