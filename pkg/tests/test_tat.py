from __future__ import annotations

import numpy as np
import pytest
from conftest import make_batch

from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.domain.synthetic import make_synthetic_dataset
from denoise_pretrain.errors import ContractViolation, SolverError
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.neural.diagnostics import (
    edge_network_profile,
    mean_pairwise_cosine,
    oversmoothing_profile,
)
from denoise_pretrain.neural.gns import GraphNetSimulator
from denoise_pretrain.neural.tat import (
    QCState,
    TailoredActivation,
    centered_cmap,
    cmap_lrelu,
    network_cmap,
    residual_cmap,
    solve_slope,
    solve_tat_slope,
)
from denoise_pretrain.tensor import Tensor

SLOPES = [0.0, 0.1, 0.37, 0.8, 1.0]


@pytest.mark.parametrize("alpha", SLOPES)
def test_cmap_fixes_one(alpha):
    assert cmap_lrelu(1.0, alpha) == pytest.approx(1.0, abs=1e-12)


def test_unit_slope_is_the_identity_map():
    grid = np.linspace(-1.0, 1.0, 41)
    np.testing.assert_allclose(cmap_lrelu(grid, 1.0), grid, atol=1e-15)


@pytest.mark.parametrize("alpha", SLOPES)
def test_cmap_is_monotone(alpha):
    values = cmap_lrelu(np.linspace(-1.0, 1.0, 201), alpha)
    assert np.all(np.diff(values) >= -1e-15)


def test_cmap_rejects_out_of_range_input():
    with pytest.raises(ContractViolation):
        cmap_lrelu(1.5, 0.2)


def test_zero_blocks_compose_to_the_identity():
    compose = residual_cmap(0, 3, 0.3)
    assert compose(0.0) == 0.0
    assert compose(0.42) == 0.42


def test_solved_slope_hits_its_target(tat_config):
    activation = solve_tat_slope(tat_config)
    assert 0.0 < activation.negative_slope < 1.0
    assert abs(network_cmap(tat_config, activation.negative_slope)(0.0) - tat_config.tat_eta) < 1e-10
    a = activation.negative_slope
    variance = (1.0 + a * a) / 2.0 - (1.0 - a) ** 2 / (2.0 * np.pi)
    assert activation.output_scale == pytest.approx(1.0 / np.sqrt(variance))
    assert activation.mean == pytest.approx(0.0, abs=1e-12)


def test_deeper_networks_need_a_gentler_slope():
    shallow = solve_slope(3, 3, 0.2).negative_slope
    deep = solve_slope(30, 3, 0.2).negative_slope
    assert deep > shallow


def test_higher_eta_means_a_smaller_slope():
    assert solve_slope(30, 3, 0.3).negative_slope > solve_slope(30, 3, 0.6).negative_slope


def test_the_default_topology_brackets_the_default_eta():
    config = GNSConfig(variant="gns_tat").resolve()
    activation = solve_tat_slope(config)
    assert abs(network_cmap(config, activation.negative_slope)(0.0) - 0.8) < 1e-10


def test_unbracketed_target_raises_solver_error():
    with pytest.raises(SolverError, match="brackets"):
        solve_slope(1, 1, 0.8)


@pytest.mark.parametrize("eta", [0.0, 1.0, -0.2])
def test_eta_outside_the_open_interval_is_rejected(eta):
    with pytest.raises(ContractViolation):
        solve_slope(3, 3, eta)


def test_slope_outside_unit_interval_is_rejected():
    with pytest.raises(ContractViolation):
        TailoredActivation.from_slope(1.5, 0.5)


def test_tensor_and_numpy_activation_agree(rng):
    activation = TailoredActivation.from_slope(0.3, 0.5)
    x = rng.normal(size=(4, 5))
    np.testing.assert_allclose(activation(Tensor(x)).numpy(), activation.numpy(x), rtol=1e-12)


def _mc_check(samples: np.ndarray, expected: float, n_se: float) -> None:
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - expected) <= n_se * se


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.7])
def test_activation_is_q_preserving_with_zero_mean(alpha):
    rng = np.random.default_rng(3)
    activation = TailoredActivation.from_slope(alpha, 0.5)
    out = activation.numpy(rng.standard_normal(1_000_000))
    _mc_check(out * out, 1.0, 5.0)
    _mc_check(out, 0.0, 5.0)


def _normalized_lrelu(x: np.ndarray, alpha: float) -> np.ndarray:
    return np.sqrt(2.0 / (1.0 + alpha * alpha)) * np.where(x >= 0, x, alpha * x)


def _correlated_pair(rng: np.random.Generator, c: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    u = rng.standard_normal(size)
    return u, c * u + np.sqrt(1.0 - c * c) * rng.standard_normal(size)


@pytest.mark.parametrize("c", [0.0, 0.5, -0.4])
def test_cmap_matches_monte_carlo(c):
    u, v = _correlated_pair(np.random.default_rng(4), c, 1_000_000)
    _mc_check(_normalized_lrelu(u, 0.25) * _normalized_lrelu(v, 0.25), cmap_lrelu(c, 0.25), 5.0)


@pytest.mark.parametrize("c", [0.0, 0.5, -0.4, 0.9])
def test_centered_cmap_matches_the_network_activation(c):
    activation = TailoredActivation.from_slope(0.25, 0.5)
    u, v = _correlated_pair(np.random.default_rng(6), c, 1_000_000)
    _mc_check(activation.numpy(u) * activation.numpy(v), activation.cmap(c), 5.0)


@pytest.mark.parametrize("alpha", SLOPES)
def test_centered_cmap_never_raises_the_magnitude_of_c(alpha):
    grid = np.linspace(-1.0, 1.0, 201)
    mapped = centered_cmap(grid, alpha)
    assert centered_cmap(0.0, alpha) == pytest.approx(0.0, abs=1e-15)
    assert centered_cmap(1.0, alpha) == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(mapped) <= np.abs(grid) + 1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("c, alpha", [(0.0, 0.0), (0.3, 0.1), (0.6, 0.5), (-0.5, 0.25), (0.9, 0.8)])
def test_cmap_matches_large_monte_carlo(c, alpha):
    u, v = _correlated_pair(np.random.default_rng(5), c, 10_000_000)
    _mc_check(_normalized_lrelu(u, alpha) * _normalized_lrelu(v, alpha), cmap_lrelu(c, alpha), 3.0)


def _wide_tat() -> GNSConfig:
    return GNSConfig(
        n_mp_layers=3, n_block_iterations=1, latent=128, mlp_hidden=128, mlp_layers=3,
        n_basis=4, variant="gns_tat", tat_eta=0.2,
    )


def test_edge_network_keeps_q_near_one():
    config = _wide_tat()
    model = GraphNetSimulator(config)
    store = model.init_params(np.random.default_rng(0))
    inputs = np.random.default_rng(1).standard_normal((64, config.latent))
    profile = edge_network_profile(model, store, inputs)
    assert len(profile) == config.n_mp_layers * (config.mlp_layers + 1) + 1
    for state in profile:
        assert 0.8 <= state.q <= 1.2


def test_edge_network_ends_near_the_target_correlation():
    config = _wide_tat()
    model = GraphNetSimulator(config)
    store = model.init_params(np.random.default_rng(0))
    inputs = np.random.default_rng(2).standard_normal((64, config.latent))
    final = edge_network_profile(model, store, inputs)[-1]
    assert final.c <= config.tat_eta + 0.1


def test_edge_profile_rejects_wrong_width(tat_config, rng):
    model = GraphNetSimulator(tat_config)
    with pytest.raises(ContractViolation):
        edge_network_profile(model, model.init_params(rng), np.zeros((4, tat_config.latent + 1)))


def test_qc_state_is_validated():
    with pytest.raises(ContractViolation):
        QCState(q=-1.0, c=0.0)
    with pytest.raises(ContractViolation):
        QCState(q=1.0, c=1.5)


def test_mean_pairwise_cosine_by_hand():
    features = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [3.0, 4.0]])
    graph_id = np.array([0, 0, 0, 1])
    expected = (0.0 + np.sqrt(0.5) + np.sqrt(0.5)) / 3.0
    assert mean_pairwise_cosine(features, graph_id) == pytest.approx(expected)
    with pytest.raises(ContractViolation):
        mean_pairwise_cosine(features[:1], graph_id[:1])


@pytest.mark.parametrize("variant", ["gns", "gns_tat"])
def test_oversmoothing_profile_has_one_entry_per_step(variant, gns_config, tat_config, small_dataset, featurizer, rng):
    model = GraphNetSimulator(gns_config if variant == "gns" else tat_config)
    batch = make_batch(list(small_dataset)[:3], featurizer)
    profile = oversmoothing_profile(model, model.init_params(rng), batch, 5)
    assert len(profile) == 6
    assert all(-1.0 <= value <= 1.0 for value in profile)


@pytest.mark.slow
def test_tat_oversmooths_less_than_gns_at_depth():
    dataset = make_synthetic_dataset(8, seed=0)
    featurizer = FeaturizerSpec(n_basis=8, r_cut=3.0)
    batch = make_batch(list(dataset), featurizer)
    common = dict(n_mp_layers=10, n_block_iterations=3, latent=32, mlp_hidden=64, mlp_layers=3, n_basis=8)
    final: dict[str, list[float]] = {"gns": [], "gns_tat": []}
    for variant in final:
        model = GraphNetSimulator(GNSConfig(variant=variant, **common))
        for seed in range(10):
            store = model.init_params(np.random.default_rng(seed))
            final[variant].append(oversmoothing_profile(model, store, batch, 30)[-1])
    assert np.mean(final["gns"]) > np.mean(final["gns_tat"])


@pytest.mark.slow
def test_baseline_edge_correlations_grow_while_tailored_ones_stay_bounded():
    common = dict(n_mp_layers=10, n_block_iterations=3, latent=64, mlp_hidden=64, mlp_layers=3, n_basis=8)
    start: list[float] = []
    final: dict[str, list[float]] = {"gns": [], "gns_tat": []}
    for variant in final:
        model = GraphNetSimulator(GNSConfig(variant=variant, **common))
        for seed in range(10):
            inputs = np.random.default_rng(100 + seed).standard_normal((16, model.config.latent))
            profile = edge_network_profile(model, model.init_params(np.random.default_rng(seed)), inputs)
            if variant == "gns":
                start.append(mean_pairwise_cosine(inputs, np.zeros(len(inputs), dtype=int)))
                final["gns"].append(profile[-1].c)
            else:
                bound = max(model.config.tat_eta + 0.1, start[seed])
                assert all(state.c <= bound for state in profile)
                final["gns_tat"].append(profile[-1].c)
    assert np.mean(final["gns"]) > np.mean(start) + 0.1
    assert np.mean(final["gns"]) > np.mean(final["gns_tat"]) + 0.1
