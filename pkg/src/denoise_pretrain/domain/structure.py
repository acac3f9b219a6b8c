""" denoise_pretrain.domain.structure

    PURPOSE:
        - the atom set S = {(a_i, p_i)} with optional scalar labels, and
          immutable collections of them

    BEHAVIOR:
        - Structure validates itself on construction (counts, finite and
          distinct coordinates, paired frame consistency)
        - Dataset is an ordered, immutable tuple of structures
        - split_dataset gives a seeded train/valid/test partition
        - coverage / composition helpers compare an upstream and a
          downstream dataset

    PUBLIC:
        - Structure
        - Dataset
        - DatasetSplit
        - split_dataset(n, fractions, seed) -> DatasetSplit
        - element_coverage(upstream, downstream) -> float
        - composition_counts(dataset) -> Counter
        - composition_overlap(upstream, downstream) -> float
        - label_statistics(dataset, label) -> LabelStats
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from denoise_pretrain.domain.elements import N_ELEMENTS, symbol_of
from denoise_pretrain.errors import ContractViolation


@dataclass(frozen=True, eq=False)
class Structure:
    atomic_numbers: np.ndarray
    positions: np.ndarray
    labels: Mapping[str, float] = field(default_factory=dict)
    pair_positions: np.ndarray | None = None

    def __post_init__(self) -> None:
        numbers = np.array(self.atomic_numbers, dtype=np.int64).reshape(-1)
        positions = np.array(self.positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 3:
            raise ContractViolation(f"positions must be N x 3, got {positions.shape}")
        if numbers.size < 1 or numbers.size != positions.shape[0]:
            raise ContractViolation(
                f"{numbers.size} atomic numbers for {positions.shape[0]} position rows"
            )
        if numbers.min() < 1 or numbers.max() > N_ELEMENTS:
            raise ContractViolation(f"atomic numbers must lie in [1, {N_ELEMENTS}]")
        _check_frame(positions, "positions")

        pair = None
        if self.pair_positions is not None:
            pair = np.array(self.pair_positions, dtype=np.float64)
            if pair.shape != positions.shape:
                raise ContractViolation(
                    f"pair_positions shape {pair.shape} != positions shape {positions.shape}"
                )
            _check_frame(pair, "pair_positions")
            pair.flags.writeable = False

        numbers.flags.writeable = False
        positions.flags.writeable = False
        object.__setattr__(self, "atomic_numbers", numbers)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "labels", {str(k): float(v) for k, v in self.labels.items()})
        object.__setattr__(self, "pair_positions", pair)

    @property
    def n_atoms(self) -> int:
        return int(self.atomic_numbers.size)

    @property
    def elements(self) -> frozenset[int]:
        return frozenset(int(z) for z in self.atomic_numbers)

    @property
    def composition(self) -> tuple[tuple[str, int], ...]:
        counts = Counter(int(z) for z in self.atomic_numbers)
        return tuple(sorted((symbol_of(z), n) for z, n in counts.items()))

    def with_positions(self, positions: np.ndarray, *, keep_pair: bool = True) -> "Structure":
        return Structure(
            self.atomic_numbers,
            positions,
            self.labels,
            self.pair_positions if keep_pair else None,
        )

    def translated(self, shift: Sequence[float]) -> "Structure":
        t = np.asarray(shift, dtype=np.float64).reshape(1, 3)
        pair = None if self.pair_positions is None else self.pair_positions + t
        return Structure(self.atomic_numbers, self.positions + t, self.labels, pair)

    def permuted(self, order: Sequence[int]) -> "Structure":
        idx = np.asarray(order, dtype=np.int64)
        if sorted(idx.tolist()) != list(range(self.n_atoms)):
            raise ContractViolation("permutation must reorder every atom exactly once")
        pair = None if self.pair_positions is None else self.pair_positions[idx]
        return Structure(self.atomic_numbers[idx], self.positions[idx], self.labels, pair)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        if (self.pair_positions is None) != (other.pair_positions is None):
            return False
        return (
            np.array_equal(self.atomic_numbers, other.atomic_numbers)
            and np.array_equal(self.positions, other.positions)
            and dict(self.labels) == dict(other.labels)
            and (
                self.pair_positions is None
                or np.array_equal(self.pair_positions, other.pair_positions)
            )
        )

    __hash__ = None  # type: ignore[assignment]


def _check_frame(positions: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(positions)):
        raise ContractViolation(f"{what} contain non-finite coordinates")
    if np.unique(positions, axis=0).shape[0] != positions.shape[0]:
        raise ContractViolation(f"{what}: two atoms share identical coordinates")


@dataclass(frozen=True)
class Dataset:
    structures: tuple[Structure, ...]
    name: str = "dataset"

    def __post_init__(self) -> None:
        object.__setattr__(self, "structures", tuple(self.structures))

    def __len__(self) -> int:
        return len(self.structures)

    def __iter__(self) -> Iterator[Structure]:
        return iter(self.structures)

    def __getitem__(self, index: int) -> Structure:
        return self.structures[index]

    def elements(self) -> frozenset[int]:
        out: set[int] = set()
        for s in self.structures:
            out |= s.elements
        return frozenset(out)

    def element_counts(self) -> Counter:
        counts: Counter = Counter()
        for s in self.structures:
            counts.update(symbol_of(int(z)) for z in s.atomic_numbers)
        return counts

    def subset(self, indices: Sequence[int], name: str | None = None) -> "Dataset":
        return Dataset(tuple(self.structures[i] for i in indices), name or self.name)

    def head(self, fraction: float) -> "Dataset":
        """ deterministic prefix holding ceil(fraction * n) structures """
        if not 0.0 < fraction <= 1.0:
            raise ContractViolation(f"subset fraction must lie in (0, 1], got {fraction}")
        keep = max(1, int(np.ceil(fraction * len(self))))
        return Dataset(self.structures[:keep], self.name)

    def label_values(self, label: str) -> np.ndarray:
        missing = [i for i, s in enumerate(self.structures) if label not in s.labels]
        if missing:
            raise ContractViolation(
                f"label {label!r} missing on {len(missing)} structures (first index {missing[0]})"
            )
        return np.array([s.labels[label] for s in self.structures], dtype=np.float64)


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[int, ...]
    valid: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    fractions: tuple[float, float, float]

    def apply(self, dataset: Dataset) -> tuple[Dataset, Dataset, Dataset]:
        return (
            dataset.subset(self.train, f"{dataset.name}/train"),
            dataset.subset(self.valid, f"{dataset.name}/valid"),
            dataset.subset(self.test, f"{dataset.name}/test"),
        )


def split_dataset(
    n: int,
    fractions: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> DatasetSplit:
    if n < 1:
        raise ContractViolation("cannot split an empty dataset")
    fr = tuple(float(f) for f in fractions)
    if len(fr) != 3 or any(f < 0 for f in fr) or not np.isclose(sum(fr), 1.0):
        raise ContractViolation(f"split fractions must be three nonnegative values summing to 1, got {fr}")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(np.floor(fr[0] * n))
    n_valid = int(np.floor(fr[1] * n))
    return DatasetSplit(
        train=tuple(int(i) for i in order[:n_train]),
        valid=tuple(int(i) for i in order[n_train : n_train + n_valid]),
        test=tuple(int(i) for i in order[n_train + n_valid :]),
        seed=seed,
        fractions=fr,  # type: ignore[arg-type]
    )


def element_coverage(upstream: Dataset, downstream: Dataset) -> float:
    """ share of downstream elements that also occur upstream """
    if len(upstream) == 0:
        raise ContractViolation("upstream dataset is empty")
    if len(downstream) == 0:
        raise ContractViolation("downstream dataset is empty")
    down = downstream.elements()
    return len(down & upstream.elements()) / len(down)


def composition_counts(dataset: Dataset) -> Counter:
    return Counter(s.composition for s in dataset)


def composition_overlap(upstream: Dataset, downstream: Dataset) -> float:
    """ share of downstream structures whose exact composition occurs upstream """
    if len(downstream) == 0:
        raise ContractViolation("downstream dataset is empty")
    seen = set(composition_counts(upstream))
    hits = sum(1 for s in downstream if s.composition in seen)
    return hits / len(downstream)


@dataclass(frozen=True)
class LabelStats:
    mean: float
    std: float

    def standardize(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=np.float64) - self.mean) / self.std

    def restore(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=np.float64) * self.std + self.mean


def label_statistics(dataset: Dataset, label: str, floor: float = 1e-12) -> LabelStats:
    values = dataset.label_values(label)
    std = float(values.std())
    return LabelStats(mean=float(values.mean()), std=std if std > floor else 1.0)
