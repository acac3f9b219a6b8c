from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.oracle.equivalence import (
    GapReport,
    draw_pairs,
    init_score_network,
    j1_j2_gradient_gap,
)
from denoise_pretrain.oracle.score import (
    MixtureModel,
    mixture_log_density,
    mixture_score,
    posterior_weights,
    project_mean_center,
    random_mixture,
    sample_subspace_noise,
    subspace_basis,
)


def _point(mixture: MixtureModel, rng: np.random.Generator) -> np.ndarray:
    k = int(rng.integers(mixture.n_centers))
    return mixture.centers[k] + mixture.sigma * sample_subspace_noise(mixture.n_atoms, 1, rng)[0]


def test_basis_spans_the_centered_subspace():
    basis = subspace_basis(4)
    assert basis.shape == (12, 9)
    np.testing.assert_allclose(basis.T @ basis, np.eye(9), atol=1e-12)
    x = np.random.default_rng(0).normal(size=12)
    np.testing.assert_allclose(basis @ (basis.T @ x), project_mean_center(x), atol=1e-12)


def test_projection_accepts_rows_and_batches(rng):
    atoms = rng.normal(size=(5, 3))
    np.testing.assert_allclose(project_mean_center(atoms).mean(axis=0), 0.0, atol=1e-15)
    batch = rng.normal(size=(7, 15))
    rows = np.stack([project_mean_center(row) for row in batch])
    np.testing.assert_allclose(project_mean_center(batch), rows, atol=1e-15)
    with pytest.raises(ContractViolation):
        project_mean_center(np.zeros(7))


def test_subspace_noise_is_unit_isotropic_on_the_subspace():
    samples = sample_subspace_noise(2, 200_000, np.random.default_rng(1))
    projector = project_mean_center(np.eye(6))
    np.testing.assert_allclose(np.cov(samples, rowvar=False), projector, atol=0.02)


def test_single_center_density_is_a_gaussian_on_the_subspace():
    rng = np.random.default_rng(2)
    mixture = random_mixture(1, 2, 0.7, rng)
    basis = subspace_basis(2)
    for _ in range(5):
        x = _point(mixture, rng)
        coords = basis.T @ (x - mixture.centers[0])
        expected = multivariate_normal(mean=np.zeros(3), cov=0.49 * np.eye(3)).logpdf(coords)
        assert mixture_log_density(mixture, x) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("instance", range(20))
def test_score_matches_finite_differences_of_log_density(instance):
    rng = np.random.default_rng(100 + instance)
    mixture = random_mixture(int(rng.integers(1, 5)), int(rng.integers(2, 6)), 0.5, rng, spread=1.0)
    x = _point(mixture, rng)
    score = mixture_score(mixture, x)
    h = 1e-5
    basis = subspace_basis(mixture.n_atoms)
    for column in basis.T:
        numeric = (mixture_log_density(mixture, x + h * column) - mixture_log_density(mixture, x - h * column)) / (2 * h)
        assert score @ column == pytest.approx(numeric, rel=1e-6, abs=1e-8)


def test_score_lies_in_the_subspace(rng):
    mixture = random_mixture(3, 4, 0.5, rng, spread=1.0)
    score = mixture_score(mixture, _point(mixture, rng))
    np.testing.assert_allclose(project_mean_center(score), score, atol=1e-12)


def test_posterior_is_one_hot_at_small_sigma(rng):
    mixture = random_mixture(3, 3, 1e-3, rng, spread=1.0)
    x = mixture.centers[1] + 1e-3 * sample_subspace_noise(3, 1, rng)[0]
    weights = posterior_weights(mixture, x)[0]
    assert weights[1] == pytest.approx(1.0, abs=1e-12)


def test_far_points_do_not_underflow(rng):
    mixture = random_mixture(2, 3, 0.01, rng, spread=1.0)
    x = project_mean_center(np.full(9, 50.0) + np.arange(9.0))
    assert np.isfinite(mixture_log_density(mixture, x))
    assert np.all(np.isfinite(mixture_score(mixture, x)))


def test_mixture_rejects_uncentered_input(rng):
    with pytest.raises(ContractViolation):
        MixtureModel(centers=np.ones((1, 6)), sigma=1.0)
    with pytest.raises(ContractViolation):
        MixtureModel(centers=np.zeros((1, 6)), sigma=0.0)
    mixture = random_mixture(2, 2, 0.5, rng)
    with pytest.raises(ContractViolation):
        mixture_score(mixture, np.ones(6))


def test_pairs_use_the_conditional_target(rng):
    mixture = random_mixture(2, 3, 0.2, rng)
    noisy, target = draw_pairs(mixture, 10, rng)
    clean = noisy + target * mixture.sigma**2
    distances = np.linalg.norm(clean[:, None, :] - mixture.centers[None], axis=-1).min(axis=1)
    np.testing.assert_allclose(distances, 0.0, atol=1e-12)


def test_score_network_size():
    params = init_score_network(12, 16, np.random.default_rng(0))
    assert sum(a.size for a in params.values()) == 412


def test_single_center_gap_is_exactly_zero():
    rng = np.random.default_rng(0)
    mixture = random_mixture(1, 4, 0.5, rng)
    report = j1_j2_gradient_gap(init_score_network(12, 16, rng), mixture, 1_000, seed=1)
    assert report.gap <= 1e-12
    assert report.n_params == 412
    assert report.n_groups == 100


def test_multi_center_gap_is_within_sampling_noise():
    rng = np.random.default_rng(1)
    mixture = random_mixture(3, 4, 0.5, rng, spread=1.0)
    report = j1_j2_gradient_gap(init_score_network(12, 16, rng), mixture, 10_000, seed=2)
    assert report.standard_error > 0
    assert report.within(5.0)
    assert set(report.to_record()) >= {"gap", "standard_error", "n_samples"}


@pytest.mark.parametrize("n_samples", [999, 10_007])
def test_sample_counts_coprime_to_the_group_count_keep_a_standard_error(n_samples):
    rng = np.random.default_rng(1)
    mixture = random_mixture(3, 4, 0.5, rng, spread=1.0)
    report = j1_j2_gradient_gap(init_score_network(12, 16, rng), mixture, n_samples, seed=2)
    assert report.n_groups == 100
    assert report.standard_error > 0
    assert report.gap == pytest.approx(report.max_z * report.standard_error, rel=1e-9)
    assert report.within(5.0)


def test_two_samples_form_two_groups():
    rng = np.random.default_rng(5)
    mixture = random_mixture(2, 3, 0.5, rng, spread=1.0)
    report = j1_j2_gradient_gap(init_score_network(9, 4, rng), mixture, 2, seed=0)
    assert report.n_groups == 2
    assert np.isfinite(report.z_threshold())


def _report(max_z: float, n_params: int) -> GapReport:
    return GapReport(
        gap=0.1 * max_z, standard_error=0.1, max_z=max_z, j1=1.0, j2=1.0,
        grad_norm=1.0, n_params=n_params, n_samples=10_000, n_groups=100,
    )


def test_within_compares_the_largest_z_score_with_a_family_wise_bound():
    assert _report(2.5, 1).within(3.0)
    assert not _report(3.5, 1).within(3.0)
    assert _report(3.5, 400).within(3.0)
    assert _report(3.5, 400).z_threshold(3.0) > _report(3.5, 1).z_threshold(3.0)


def test_gap_is_seeded():
    rng = np.random.default_rng(3)
    mixture = random_mixture(2, 3, 0.5, rng)
    params = init_score_network(9, 8, rng)
    assert j1_j2_gradient_gap(params, mixture, 200, seed=4) == j1_j2_gradient_gap(params, mixture, 200, seed=4)


def test_gap_rejects_a_mismatched_score_network(rng):
    mixture = random_mixture(2, 3, 0.5, rng)
    with pytest.raises(ContractViolation):
        j1_j2_gradient_gap(init_score_network(12, 8, rng), mixture, 10, seed=0)
    for n_samples in (0, 1):
        with pytest.raises(ContractViolation):
            j1_j2_gradient_gap(init_score_network(9, 8, rng), mixture, n_samples, seed=0)


@pytest.mark.slow
def test_multi_center_gap_at_full_sample_size():
    rng = np.random.default_rng(7)
    mixture = random_mixture(3, 4, 0.1, rng)
    report = j1_j2_gradient_gap(init_score_network(12, 16, rng), mixture, 100_000, seed=8)
    assert report.within(3.0)
