""" denoise_pretrain.training.prepare

    PURPOSE:
        - turn structures into ready-to-batch training examples

    BEHAVIOR:
        - every example draws its noise and atom mask from a generator keyed
          by (seed, epoch, dataset index), so the stream is identical for
          any thread count and can be restarted at any cursor
        - denoise_target "noise": Gaussian corruption, target is the unit
          noise; "relaxed": interpolation between the initial and relaxed
          frames plus noise, target is the displacement to the relaxed frame
        - the graph is built on the corrupted positions
        - preparation runs ahead in bounded chunks on a thread pool; results
          keep stream order

    PUBLIC:
        - Cursor
        - Example
        - PrepSpec
        - prepare_example(structure, index, epoch, spec) -> Example
        - epoch_order(n, seed, epoch) -> ndarray
        - example_stream(dataset, spec, start, threads) -> Iterator[Example]
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterator

import numpy as np

from denoise_pretrain.bridges.specs.objective import NoiseSpec
from denoise_pretrain.domain.structure import Dataset, LabelStats, Structure
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.graph.radius import RadiusGraph, build_graph
from denoise_pretrain.objectives.noise import corrupt, interpolate_corrupt, relaxed_pair, sample_atom_mask

CHUNK = 32
ORDER_STREAM = 0
EXAMPLE_STREAM = 1


@dataclass(frozen=True)
class Cursor:
    """ position of the NEXT structure to draw: epoch and offset in that epoch's order """

    epoch: int = 0
    position: int = 0

    def to_record(self) -> dict[str, int]:
        return {"epoch": self.epoch, "position": self.position}


@dataclass(frozen=True, eq=False)
class Example:
    graph: RadiusGraph
    target: np.ndarray
    mask: np.ndarray
    label: float | None
    index: int
    after: Cursor

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def n_edges(self) -> int:
        return self.graph.n_edges


@dataclass(frozen=True)
class PrepSpec:
    featurizer: FeaturizerSpec
    max_edges_per_vertex: int
    noise: NoiseSpec
    mask_prob: float = 0.0
    label: str | None = None
    stats: LabelStats | None = None
    seed: int = 0


def example_rng(seed: int, epoch: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, EXAMPLE_STREAM, epoch, index]))


def epoch_order(n: int, seed: int, epoch: int) -> np.ndarray:
    return np.random.default_rng(np.random.SeedSequence([seed, ORDER_STREAM, epoch])).permutation(n)


def _corrupted(structure: Structure, spec: PrepSpec, rng: np.random.Generator) -> tuple[Structure, np.ndarray]:
    if spec.noise.target == "relaxed":
        initial, relaxed = relaxed_pair(structure)
        return interpolate_corrupt(initial, relaxed, spec.noise.sigma, rng)
    return corrupt(structure, spec.noise, rng)


def prepare_example(
    structure: Structure,
    index: int,
    epoch: int,
    spec: PrepSpec,
    after: Cursor = Cursor(),
) -> Example:
    rng = example_rng(spec.seed, epoch, index)
    source, target = _corrupted(structure, spec, rng)
    mask = sample_atom_mask(structure.n_atoms, spec.mask_prob, rng)
    graph = build_graph(source, spec.featurizer.r_cut, spec.max_edges_per_vertex, spec.featurizer)
    label = None
    if spec.label is not None:
        if spec.label not in structure.labels:
            raise ContractViolation(f"structure {index} has no label {spec.label!r}")
        value = structure.labels[spec.label]
        label = float(spec.stats.standardize(np.asarray(value))) if spec.stats is not None else float(value)
    return Example(graph=graph, target=np.asarray(target, dtype=np.float64), mask=mask, label=label, index=index, after=after)


def _prepare_at(dataset: Dataset, spec: PrepSpec, epoch: int, slot: tuple[int, int]) -> Example:
    position, index = slot
    return prepare_example(dataset[index], index, epoch, spec, Cursor(epoch, position + 1))


def example_stream(
    dataset: Dataset,
    spec: PrepSpec,
    start: Cursor = Cursor(),
    threads: int = 1,
) -> Iterator[Example]:
    """ endless epochs over dataset, beginning at start """
    n = len(dataset)
    if n == 0:
        raise ContractViolation(f"dataset {dataset.name!r} is empty")
    epoch, position = start.epoch, start.position
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        while True:
            order = epoch_order(n, spec.seed, epoch)
            work = partial(_prepare_at, dataset, spec, epoch)
            while position < n:
                stop = min(n, position + CHUNK)
                slots = [(p, int(order[p])) for p in range(position, stop)]
                yield from pool.map(work, slots)
                position = stop
            epoch, position = epoch + 1, 0
