""" denoise_pretrain.domain.synthetic

    PURPOSE:
        - bundled desk-scale molecular dataset whose structures sit at local
          minima of a pairwise Lennard-Jones style surrogate energy

    BEHAVIOR:
        - each structure draws 4-16 atoms from a small element palette,
          scatters them in a box, then relaxes them with L-BFGS
        - every structure gets its own SeedSequence child so the output does
          not depend on the thread count
        - labels: surrogate_energy and dipole_norm (partial-charge dipole)
        - include_initial=True keeps the random start as positions and the
          relaxed frame as pair_positions

    PUBLIC:
        - SurrogateParams
        - surrogate_energy(numbers, positions) -> (energy, gradient)
        - mean_force_norm(structure) -> float
        - make_synthetic_dataset(n, seed, ...) -> Dataset
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from denoise_pretrain.domain.elements import atomic_number
from denoise_pretrain.domain.structure import Dataset, Structure
from denoise_pretrain.errors import ContractViolation

LOGGER = logging.getLogger(__name__)

DEFAULT_ELEMENTS: tuple[str, ...] = ("H", "C", "N", "O", "F")
MIN_ATOMS = 4
MAX_ATOMS = 16
FORCE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class SurrogateParams:
    """ per-element radius (sets the pair minimum), well depth and partial charge """

    radius: float
    depth: float
    charge: float


SURROGATE_TABLE: dict[int, SurrogateParams] = {
    1: SurrogateParams(radius=0.85, depth=0.50, charge=0.25),
    6: SurrogateParams(radius=1.00, depth=1.00, charge=-0.05),
    7: SurrogateParams(radius=0.97, depth=0.90, charge=-0.30),
    8: SurrogateParams(radius=0.95, depth=0.80, charge=-0.40),
    9: SurrogateParams(radius=0.93, depth=0.60, charge=-0.25),
    15: SurrogateParams(radius=1.10, depth=1.10, charge=0.10),
    16: SurrogateParams(radius=1.08, depth=1.05, charge=-0.10),
    17: SurrogateParams(radius=1.05, depth=0.70, charge=-0.20),
}

# 2^(1/6) sigma_ij = r_i + r_j puts the pair minimum at the summed radii
_SIGMA_SCALE = 2.0 ** (-1.0 / 6.0)


def _pair_tables(numbers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        params = [SURROGATE_TABLE[int(z)] for z in numbers]
    except KeyError as exc:
        raise ContractViolation(f"no surrogate parameters for atomic number {exc.args[0]}") from exc
    radius = np.array([p.radius for p in params])
    depth = np.array([p.depth for p in params])
    sigma = _SIGMA_SCALE * (radius[:, None] + radius[None, :])
    eps = np.sqrt(depth[:, None] * depth[None, :])
    return sigma, eps


def surrogate_energy(numbers: np.ndarray, positions: np.ndarray) -> tuple[float, np.ndarray]:
    """ sum over pairs of 4 eps ((s/r)^12 - (s/r)^6) and its gradient wrt positions """
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    sigma, eps = _pair_tables(np.asarray(numbers))
    diff = pos[:, None, :] - pos[None, :, :]
    r2 = np.sum(diff * diff, axis=-1)
    n = pos.shape[0]
    np.fill_diagonal(r2, 1.0)
    s6 = (sigma * sigma / r2) ** 3
    s12 = s6 * s6
    pair = 4.0 * eps * (s12 - s6)
    np.fill_diagonal(pair, 0.0)
    # dE/dr / r, diagonal masked
    coeff = 4.0 * eps * (-12.0 * s12 + 6.0 * s6) / r2
    coeff[np.arange(n), np.arange(n)] = 0.0
    gradient = np.sum(coeff[:, :, None] * diff, axis=1)
    return 0.5 * float(pair.sum()), gradient


def mean_force_norm(structure: Structure) -> float:
    _, gradient = surrogate_energy(structure.atomic_numbers, structure.positions)
    return float(np.linalg.norm(gradient, axis=1).mean())


def dipole_norm(numbers: np.ndarray, positions: np.ndarray) -> float:
    charges = np.array([SURROGATE_TABLE[int(z)].charge for z in numbers])
    centered = positions - positions.mean(axis=0, keepdims=True)
    return float(np.linalg.norm(charges @ centered))


def _random_start(n_atoms: int, rng: np.random.Generator, min_separation: float = 1.4) -> np.ndarray:
    box = (5.6 * n_atoms) ** (1.0 / 3.0)
    placed: list[np.ndarray] = []
    attempts = 0
    while len(placed) < n_atoms:
        candidate = rng.uniform(0.0, box, size=3)
        if all(np.linalg.norm(candidate - p) >= min_separation for p in placed):
            placed.append(candidate)
        attempts += 1
        if attempts % 500 == 0:
            box *= 1.1
    return np.array(placed)


def _relax(numbers: np.ndarray, start: np.ndarray) -> np.ndarray:
    def objective(flat: np.ndarray) -> tuple[float, np.ndarray]:
        energy, gradient = surrogate_energy(numbers, flat)
        return energy, gradient.reshape(-1)

    result = minimize(
        objective,
        start.reshape(-1),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 20000, "gtol": 1e-12, "ftol": 1e-16},
    )
    flat = result.x
    _, gradient = surrogate_energy(numbers, flat)
    if np.linalg.norm(gradient.reshape(-1, 3), axis=1).mean() > FORCE_TOLERANCE:
        polish = minimize(objective, flat, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 20000})
        flat = polish.x
    return flat.reshape(-1, 3)


def _one_structure(
    seed: np.random.SeedSequence,
    palette: np.ndarray,
    include_initial: bool,
    max_tries: int = 20,
) -> Structure:
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        n_atoms = int(rng.integers(MIN_ATOMS, MAX_ATOMS + 1))
        numbers = rng.choice(palette, size=n_atoms)
        start = _random_start(n_atoms, rng)
        relaxed = _relax(numbers, start)
        energy, gradient = surrogate_energy(numbers, relaxed)
        if np.linalg.norm(gradient, axis=1).mean() > FORCE_TOLERANCE:
            LOGGER.debug("relaxation did not converge for %d atoms; redrawing", n_atoms)
            continue
        # centre on the relaxed centroid
        centroid = relaxed.mean(axis=0, keepdims=True)
        relaxed = relaxed - centroid
        labels = {
            "surrogate_energy": energy,
            "dipole_norm": dipole_norm(numbers, relaxed),
        }
        if include_initial:
            return Structure(numbers, start - centroid, labels, pair_positions=relaxed)
        return Structure(numbers, relaxed, labels)
    raise ContractViolation(f"surrogate relaxation failed {max_tries} times in a row")


def make_synthetic_dataset(
    n: int,
    seed: int = 0,
    *,
    elements: Sequence[str] = DEFAULT_ELEMENTS,
    include_initial: bool = False,
    threads: int = 1,
    name: str = "synthetic",
) -> Dataset:
    if n < 1:
        raise ContractViolation(f"synthetic dataset size must be >= 1, got {n}")
    palette = np.array(sorted({atomic_number(e) for e in elements}), dtype=np.int64)
    children = np.random.SeedSequence(seed).spawn(n)

    def build(child: np.random.SeedSequence) -> Structure:
        return _one_structure(child, palette, include_initial)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            structures = tuple(pool.map(build, children))
    else:
        structures = tuple(build(child) for child in children)
    LOGGER.info("generated %d synthetic structures (seed=%d)", n, seed)
    return Dataset(structures, name)
