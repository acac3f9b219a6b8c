from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from conftest import make_batch
from scipy.spatial.transform import Rotation

from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.bridges.specs.objective import LossWeights
from denoise_pretrain.domain.elements import N_ELEMENTS
from denoise_pretrain.domain.structure import Structure
from denoise_pretrain.errors import ConfigError
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.gns import (
    GraphNetSimulator,
    decode_graph,
    decode_vertex,
    directional_noise,
    edge_update,
    graph_readout_input,
    processor_step,
)
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.objectives.losses import mean_of, noisy_nodes_loss
from denoise_pretrain.tensor import Tape, Tensor, grad

TOL = 1e-10


@pytest.fixture(params=["gns", "gns_tat"])
def model(request, gns_config, tat_config) -> GraphNetSimulator:
    return GraphNetSimulator(gns_config if request.param == "gns" else tat_config)


def _outputs(model, store, structures, featurizer):
    predictions = model.forward(make_batch(structures, featurizer), store.constants())
    return [(p.noise.numpy(), p.type_logits.numpy(), p.graph.numpy()) for p in predictions]


def test_forward_shapes(model, small_dataset, featurizer, rng):
    store = model.init_params(rng)
    structures = list(small_dataset)[:3]
    outputs = _outputs(model, store, structures, featurizer)
    assert len(outputs) == model.config.n_block_iterations
    n_atoms = sum(s.n_atoms for s in structures)
    for noise, logits, graph in outputs:
        assert noise.shape == (n_atoms, 3)
        assert logits.shape == (n_atoms, N_ELEMENTS)
        assert graph.shape == (3,)


def test_outputs_are_translation_invariant(model, small_dataset, featurizer, rng):
    store = model.init_params(rng)
    structures = list(small_dataset)[:2]
    moved = [s.translated([3.5, -1.25, 10.0]) for s in structures]
    for before, after in zip(_outputs(model, store, structures, featurizer), _outputs(model, store, moved, featurizer)):
        for a, b in zip(before, after):
            np.testing.assert_allclose(a, b, atol=TOL, rtol=0)


def test_vertex_outputs_are_permutation_equivariant(model, small_dataset, featurizer, rng):
    store = model.init_params(rng)
    structure = small_dataset[0]
    order = rng.permutation(structure.n_atoms)
    base = _outputs(model, store, [structure], featurizer)
    permuted = _outputs(model, store, [structure.permuted(order)], featurizer)
    for (noise, logits, graph), (p_noise, p_logits, p_graph) in zip(base, permuted):
        np.testing.assert_allclose(p_noise, noise[order], atol=TOL, rtol=0)
        np.testing.assert_allclose(p_logits, logits[order], atol=TOL, rtol=0)
        np.testing.assert_allclose(p_graph, graph, atol=TOL, rtol=0)


def test_batched_graph_outputs_match_single_graphs(model, small_dataset, featurizer, rng):
    store = model.init_params(rng)
    structures = list(small_dataset)[:3]
    batched = _outputs(model, store, structures, featurizer)[-1][2]
    single = [_outputs(model, store, [s], featurizer)[-1][2][0] for s in structures]
    np.testing.assert_allclose(batched, single, atol=TOL, rtol=0)


def test_noise_turns_with_the_molecule(model, small_dataset, featurizer, rng):
    store = model.init_params(rng)
    structure = small_dataset[0]
    turn = Rotation.from_rotvec([0.3, -1.1, 0.7]).as_matrix()
    turned = structure.with_positions(structure.positions @ turn.T, keep_pair=False)
    base = _outputs(model, store, [structure], featurizer)
    rotated = _outputs(model, store, [turned], featurizer)
    for (noise, logits, graph), (r_noise, r_logits, r_graph) in zip(base, rotated):
        np.testing.assert_allclose(r_noise, noise @ turn.T, atol=TOL, rtol=0)
        np.testing.assert_allclose(r_logits, logits, atol=TOL, rtol=0)
        np.testing.assert_allclose(r_graph, graph, atol=TOL, rtol=0)


def test_vertex_readout_has_no_edge_head(gns_config, rng):
    config = replace(gns_config, noise_readout="vertex")
    store = GraphNetSimulator(config).init_params(rng)
    assert not any(name.startswith(layout.NOISE_EDGE_HEAD + "/") for name in store)
    default = GraphNetSimulator(gns_config).init_params(rng)
    assert any(name.startswith(layout.NOISE_EDGE_HEAD + "/") for name in default)


def _zeroed(state):
    return state.replace(Tensor(np.zeros(state.vertex.shape)), Tensor(np.zeros(state.edge.shape)))


def _assert_constant_rows(values):
    np.testing.assert_allclose(values, np.broadcast_to(values[0], values.shape), atol=1e-14, rtol=0)


def test_zero_state_decodes_to_constant_rows(model, small_dataset, featurizer, rng):
    config = replace(model.config, noise_readout="vertex")
    vertex_only = GraphNetSimulator(config)
    params = vertex_only.init_params(rng).constants()
    state = vertex_only.encode(make_batch([small_dataset[0]], featurizer), params)
    noise, logits = decode_vertex(_zeroed(state), params, config, vertex_only.activation)
    _assert_constant_rows(noise.numpy())
    _assert_constant_rows(logits.numpy())


def test_zero_state_gives_no_directional_noise_at_init(gns_config, small_dataset, featurizer, rng):
    model = GraphNetSimulator(gns_config)
    params = model.init_params(rng).constants()
    state = _zeroed(model.encode(make_batch([small_dataset[0]], featurizer), params))
    directional = directional_noise(state, params, gns_config, model.activation).numpy()
    assert np.array_equal(directional, np.zeros((state.vertex.shape[0], 3)))
    _assert_constant_rows(decode_vertex(state, params, gns_config, model.activation)[0].numpy())


def _with_far_atom(structure: Structure, shift) -> Structure:
    return Structure(
        atomic_numbers=np.r_[structure.atomic_numbers, 6],
        positions=np.vstack([structure.positions + np.asarray(shift, dtype=float), [[50.0, 50.0, 50.0]]]),
    )


def test_isolated_vertex_passes_through_forward(model, water_like, featurizer, rng):
    params = model.init_params(rng).constants()
    lonely = water_like.n_atoms
    batch = make_batch([_with_far_atom(water_like, [0.0, 0.0, 0.0])], featurizer)
    assert lonely not in batch.receivers and lonely not in batch.senders
    moved = make_batch([_with_far_atom(water_like, [0.0, 3.0, -2.0])], featurizer)
    for before, after in zip(model.forward(batch, params), model.forward(moved, params)):
        for p in (before, after):
            assert np.all(np.isfinite(p.noise.numpy()))
            assert np.all(np.isfinite(p.type_logits.numpy()))
            assert np.all(np.isfinite(p.graph.numpy()))
        np.testing.assert_allclose(after.noise.numpy()[lonely], before.noise.numpy()[lonely], atol=TOL, rtol=0)
        np.testing.assert_allclose(
            after.type_logits.numpy()[lonely], before.type_logits.numpy()[lonely], atol=TOL, rtol=0
        )


def _doubled(structure: Structure) -> Structure:
    return Structure(
        atomic_numbers=np.r_[structure.atomic_numbers, structure.atomic_numbers],
        positions=np.vstack([structure.positions, structure.positions + [100.0, 0.0, 0.0]]),
    )


@pytest.mark.parametrize("aggregation", ["sum", "mean"])
def test_duplicated_atoms_double_a_summed_readout_and_keep_a_mean(
    aggregation, gns_config, small_dataset, featurizer, rng
):
    config = replace(gns_config, decoder_aggregation=aggregation)
    model = GraphNetSimulator(config)
    params = model.init_params(rng).constants()
    structure = small_dataset[0]
    once = model.forward(make_batch([structure], featurizer), params)[-1]
    twice = model.forward(make_batch([_doubled(structure)], featurizer), params)[-1]
    single = graph_readout_input(once.state, params, config, model.activation).numpy()
    double = graph_readout_input(twice.state, params, config, model.activation).numpy()
    factor = 2.0 if aggregation == "sum" else 1.0
    np.testing.assert_allclose(double, factor * single, atol=1e-9, rtol=0)
    if aggregation == "mean":
        np.testing.assert_allclose(twice.graph.numpy(), once.graph.numpy(), atol=1e-9, rtol=0)
        np.testing.assert_allclose(
            decode_graph(twice.state, params, config, model.activation).numpy(), once.graph.numpy(), atol=1e-9, rtol=0
        )


def test_init_is_seeded(model):
    a = model.init_params(np.random.default_rng(7))
    b = model.init_params(np.random.default_rng(7))
    c = model.init_params(np.random.default_rng(8))
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()


def test_baseline_init_is_fan_in_gaussian(gns_config, rng):
    store = GraphNetSimulator(gns_config).init_params(rng)
    w, b = layout.linear(layout.edge_mlp(0), 0)
    assert store.schemes[w] == "fan_in_gaussian"
    assert np.array_equal(store.view(b), np.zeros(gns_config.mlp_hidden))


def _silence_interactions(store: ParamStore, config: GNSConfig) -> ParamStore:
    out = store.copy()
    for step in range(config.n_mp_layers):
        for prefix in (layout.edge_mlp(step), layout.vertex_mlp(step)):
            for name in layout.linear(prefix, config.mlp_layers):
                out.set(name, np.zeros(out.view(name).shape))
    return out


def test_zero_interaction_output_keeps_or_scales_the_state(model, small_dataset, featurizer, rng):
    config = model.config
    store = _silence_interactions(model.init_params(rng), config)
    params = store.constants()
    state = model.encode(make_batch([small_dataset[0]], featurizer), params)
    after = processor_step(state, params, 0, config, model.activation)
    factor = config.shortcut_weight if config.is_tat else 1.0
    np.testing.assert_allclose(after.vertex.numpy(), factor * state.vertex.numpy(), atol=1e-14)
    np.testing.assert_allclose(after.edge.numpy(), factor * state.edge.numpy(), atol=1e-14)


def test_edge_network_ignores_vertex_features_at_init(tat_config, rng):
    model = GraphNetSimulator(tat_config)
    store = model.init_params(rng)
    params = store.constants()
    edges = Tensor(rng.normal(size=(16, tat_config.latent)))
    outs = []
    for _ in range(2):
        senders = Tensor(rng.normal(size=(16, tat_config.latent)))
        receivers = Tensor(rng.normal(size=(16, tat_config.latent)))
        outs.append(
            edge_update(edges, senders, receivers, params, layout.edge_mlp(0), model.config, model.activation).numpy()
        )
    np.testing.assert_allclose(outs[0], outs[1], atol=1e-12, rtol=0)


def test_edge_delta_zeroes_vertex_blocks(tat_config, rng):
    store = GraphNetSimulator(tat_config).init_params(rng)
    width = tat_config.latent
    for step in range(tat_config.n_mp_layers):
        w, b = layout.linear(layout.edge_mlp(step), 0)
        weight = store.view(w)
        assert np.array_equal(weight[width:], np.zeros_like(weight[width:]))
        assert np.array_equal(store.view(b), np.zeros(weight.shape[1]))
        assert store.schemes[w] == "edge_delta"


def test_edge_delta_variance_uses_edge_fan_in_only():
    config = GNSConfig(
        n_mp_layers=3, n_block_iterations=1, latent=100, mlp_hidden=100, mlp_layers=3,
        n_basis=4, variant="gns_tat", tat_eta=0.2,
    )
    store = GraphNetSimulator(config).init_params(np.random.default_rng(1))
    w, _ = layout.linear(layout.edge_mlp(0), 0)
    edge_block = store.view(w)[: config.latent]
    assert edge_block.var() == pytest.approx(1.0 / config.latent, rel=0.1)


def test_tat_variant_forces_its_construction():
    config = GNSConfig(variant="gns_tat", activation="shifted_softplus", decoder_aggregation="sum").resolve()
    assert config.activation == "tailored_lrelu"
    assert config.decoder_aggregation == "mean"
    baseline = GNSConfig(variant="gns", activation="tailored_lrelu").resolve()
    assert baseline.activation == "shifted_softplus"


def test_bad_topology_is_rejected():
    with pytest.raises(ConfigError):
        GNSConfig.from_mapping({"message_passing_layers": 0})
    with pytest.raises(ConfigError):
        GNSConfig.from_mapping({"variant": "transformer"})


def _loss_fn(model, batch, mask, eps, numbers, labels, weights):
    def loss(params):
        predictions = model.forward(batch, params, mask)
        terms = [
            noisy_nodes_loss(p.graph, labels, p.noise, eps, p.type_logits, (numbers, mask), weights,
                             batch.graph_id, batch.n_graphs)
            for p in predictions
        ]
        return mean_of([t.total for t in terms])

    return loss


@pytest.mark.parametrize("variant", ["gns", "gns_tat"])
def test_end_to_end_gradient_matches_central_differences(variant, gns_config, tat_config, small_dataset, featurizer):
    rng = np.random.default_rng(11)
    model = GraphNetSimulator(gns_config if variant == "gns" else tat_config)
    store = model.init_params(rng)
    structures = list(small_dataset)[:2]
    batch = make_batch(structures, featurizer)
    mask = rng.random(batch.n_vertices) < 0.5
    eps = rng.normal(size=(batch.n_vertices, 3))
    labels = rng.normal(size=batch.n_graphs)
    weights = LossWeights(position_coeff=1.0, target_coeff=0.5, atom_type_coeff=0.25, atom_mask_prob=0.5)
    loss = _loss_fn(model, batch, mask, eps, batch.atomic_numbers, labels, weights)

    tape = Tape()
    leaves = store.attach(tape)
    names = list(store)
    analytic = dict(zip(names, (g.numpy() for g in grad(loss(leaves), [leaves[n] for n in names]))))

    arrays = store.as_dict()
    picks = [(names[i], int(rng.integers(arrays[names[i]].size))) for i in rng.integers(len(names), size=200)]
    h = 1e-6
    for name, flat in picks:
        values = []
        for sign in (1.0, -1.0):
            shifted = {n: a.copy() for n, a in arrays.items()}
            shifted[name].reshape(-1)[flat] += sign * h
            values.append(loss(ParamStore.from_arrays(shifted).constants()).item())
        numeric = (values[0] - values[1]) / (2.0 * h)
        expected = analytic[name].reshape(-1)[flat]
        assert abs(expected - numeric) <= 1e-4 * abs(expected) + 1e-7, name
