""" denoise_pretrain.oracle.score

    PURPOSE:
        - Gaussian mixture over mean-centered structures and its exact score

    BEHAVIOR:
        - structures with N atoms are flattened 3N-vectors; V is the
          (3N - 3)-dimensional subspace with zero centroid
        - q(x~) = mean_i N(x~; x_i, sigma^2 I_V); the normalizer uses
          (2 pi sigma^2)^((3N - 3) / 2)
        - log q and the score use log-sum-exp / softmax weights so distant
          centers do not underflow

    PUBLIC:
        - MixtureModel
        - project_mean_center(x) -> x
        - subspace_basis(n_atoms) -> (3N, 3N - 3) orthonormal columns
        - sample_subspace_noise(n_atoms, size, rng) -> (size, 3N)
        - mixture_log_density(model, x~) -> float
        - mixture_score(model, x~) -> 3N vector
        - random_mixture(n_centers, n_atoms, sigma, rng, spread=None) -> MixtureModel
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.special import logsumexp, softmax

from denoise_pretrain.errors import ContractViolation

CENTERING_TOLERANCE = 1e-8


def project_mean_center(x: np.ndarray) -> np.ndarray:
    """ subtract the per-axis atom mean; accepts (3N,), (N, 3) or (S, 3N) """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 3:
        return arr - arr.mean(axis=0, keepdims=True)
    if arr.shape[-1] % 3 != 0 or arr.shape[-1] == 0:
        raise ContractViolation(f"expected 3N coordinates, got trailing size {arr.shape[-1]}")
    atoms = arr.reshape(*arr.shape[:-1], -1, 3)
    return (atoms - atoms.mean(axis=-2, keepdims=True)).reshape(arr.shape)


def subspace_basis(n_atoms: int) -> np.ndarray:
    if n_atoms < 1:
        raise ContractViolation("need at least one atom")
    translations = np.tile(np.eye(3), (1, n_atoms))
    return null_space(translations)


def sample_subspace_noise(n_atoms: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """ isotropic unit Gaussian on V: project ambient normals, no rescale """
    return project_mean_center(rng.standard_normal((size, 3 * n_atoms)))


def _is_centered(x: np.ndarray) -> bool:
    atoms = x.reshape(*x.shape[:-1], -1, 3)
    scale = max(1.0, float(np.abs(x).max(initial=0.0)))
    return bool(np.all(np.abs(atoms.mean(axis=-2)) <= CENTERING_TOLERANCE * scale))


@dataclass(frozen=True, eq=False)
class MixtureModel:
    centers: np.ndarray
    sigma: float

    def __post_init__(self) -> None:
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        if centers.shape[1] % 3 != 0:
            raise ContractViolation(f"centers must be 3N-vectors, got width {centers.shape[1]}")
        if self.sigma <= 0:
            raise ContractViolation(f"sigma must be > 0, got {self.sigma}")
        if not _is_centered(centers):
            raise ContractViolation("every mixture center must have zero centroid")
        centers.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def n_centers(self) -> int:
        return int(self.centers.shape[0])

    @property
    def n_atoms(self) -> int:
        return int(self.centers.shape[1] // 3)

    @property
    def subspace_dim(self) -> int:
        return 3 * self.n_atoms - 3

    def logits(self, x: np.ndarray) -> np.ndarray:
        """ -|x - x_i|^2 / (2 sigma^2) per sample and center """
        pts = np.atleast_2d(x)
        sq = np.sum((pts[:, None, :] - self.centers[None, :, :]) ** 2, axis=-1)
        return -sq / (2.0 * self.sigma**2)

    def check_point(self, x: np.ndarray) -> np.ndarray:
        pts = np.asarray(x, dtype=np.float64)
        if pts.shape[-1] != self.centers.shape[1]:
            raise ContractViolation(f"point width {pts.shape[-1]} != {self.centers.shape[1]}")
        if not _is_centered(pts):
            raise ContractViolation("mixture points must be mean-centered")
        return pts


def mixture_log_density(model: MixtureModel, x: np.ndarray) -> float | np.ndarray:
    pts = model.check_point(x)
    lse = logsumexp(model.logits(pts), axis=1)
    d = model.subspace_dim
    out = lse - np.log(model.n_centers) - 0.5 * d * np.log(2.0 * np.pi * model.sigma**2)
    return float(out[0]) if pts.ndim == 1 else out


def posterior_weights(model: MixtureModel, x: np.ndarray) -> np.ndarray:
    return softmax(model.logits(model.check_point(x)), axis=1)


def mixture_score(model: MixtureModel, x: np.ndarray) -> np.ndarray:
    """ sum_i w_i(x) (x_i - x) / sigma^2, softmax weights """
    pts = model.check_point(x)
    weights = softmax(model.logits(pts), axis=1)
    score = (weights @ model.centers - np.atleast_2d(pts)) / model.sigma**2
    return score[0] if pts.ndim == 1 else score


def random_mixture(
    n_centers: int,
    n_atoms: int,
    sigma: float,
    rng: np.random.Generator,
    spread: float | None = None,
) -> MixtureModel:
    """ centers drawn as spread * projected normals; spread defaults to sigma """
    if n_centers < 1 or n_atoms < 1:
        raise ContractViolation("need at least one center and one atom")
    scale = sigma if spread is None else spread
    centers = scale * sample_subspace_noise(n_atoms, n_centers, rng)
    return MixtureModel(centers=centers, sigma=sigma)
