""" denoise_pretrain.objectives.noise

    PURPOSE:
        - build corrupted inputs and their regression targets

    BEHAVIOR:
        - corrupt: p~ = p + sigma * eps, target eps; with mean_center the
          per-structure mean of eps is removed first and the same eps moves
          the positions; sigma = 0 returns the structure and a zero target
        - interpolate_corrupt: a random point between the initial and relaxed
          frames plus noise; target is the displacement to the relaxed frame
        - sample_atom_mask: Bernoulli(prob) flag per atom
        - callers pass an explicit numpy Generator; nothing touches global state

    PUBLIC:
        - corrupt(structure, spec, rng) -> (Structure, eps)
        - interpolate_corrupt(initial, relaxed, sigma, rng, u=None) -> (Structure, target)
        - sample_atom_mask(n_atoms, prob, rng) -> bool array
"""

from __future__ import annotations

import numpy as np

from denoise_pretrain.bridges.specs.objective import NoiseSpec
from denoise_pretrain.domain.structure import Structure
from denoise_pretrain.errors import ContractViolation


def centered_noise(n_atoms: int, rng: np.random.Generator, mean_center: bool = True) -> np.ndarray:
    eps = rng.standard_normal((n_atoms, 3))
    if mean_center:
        eps = eps - eps.mean(axis=0, keepdims=True)
    return eps


def corrupt(
    structure: Structure,
    spec: NoiseSpec,
    rng: np.random.Generator | None = None,
) -> tuple[Structure, np.ndarray]:
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    if spec.sigma == 0:
        return structure, np.zeros((structure.n_atoms, 3))
    eps = centered_noise(structure.n_atoms, rng, spec.mean_center)
    noisy = structure.with_positions(structure.positions + spec.sigma * eps)
    return noisy, eps


def interpolate_corrupt(
    initial: Structure,
    relaxed: Structure,
    sigma: float,
    rng: np.random.Generator,
    u: float | None = None,
) -> tuple[Structure, np.ndarray]:
    if initial.n_atoms != relaxed.n_atoms or not np.array_equal(
        initial.atomic_numbers, relaxed.atomic_numbers
    ):
        raise ContractViolation("initial and relaxed frames must hold the same atoms in the same order")
    if sigma < 0:
        raise ContractViolation(f"sigma must be >= 0, got {sigma}")
    weight = float(rng.uniform(0.0, 1.0)) if u is None else float(u)
    if not 0.0 <= weight <= 1.0:
        raise ContractViolation(f"interpolation weight must lie in [0, 1], got {weight}")
    mixed = (1.0 - weight) * initial.positions + weight * relaxed.positions
    if sigma > 0:
        mixed = mixed + sigma * rng.standard_normal(mixed.shape)
    source = Structure(initial.atomic_numbers, mixed, initial.labels)
    return source, relaxed.positions - mixed


def relaxed_pair(structure: Structure) -> tuple[Structure, Structure]:
    """ split a structure carrying pair_positions into (initial, relaxed) """
    if structure.pair_positions is None:
        raise ContractViolation("structure has no relaxed frame (pair_positions)")
    initial = Structure(structure.atomic_numbers, structure.positions, structure.labels)
    relaxed = Structure(structure.atomic_numbers, structure.pair_positions, structure.labels)
    return initial, relaxed


def sample_atom_mask(n_atoms: int, prob: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= prob <= 1.0:
        raise ContractViolation(f"mask probability must lie in [0, 1], got {prob}")
    if prob == 0.0:
        return np.zeros(n_atoms, dtype=bool)
    return rng.random(n_atoms) < prob
