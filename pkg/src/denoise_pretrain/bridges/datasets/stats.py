""" denoise_pretrain.bridges.datasets.stats

    PURPOSE:
        - dataset-stats: how much chemistry the upstream set shares with the
          downstream set

    BEHAVIOR:
        - per dataset: structure count, atom-count range and mean, element
          set, label mean/std for every label present on all structures
        - across datasets: element coverage and composition overlap
        - writes summary.csv and compositions.csv under datasets/ and returns
          the summary rows for standard output

    PUBLIC:
        - Request
        - Result
        - DatasetStatsBridge
        - composition_key(composition) -> str
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from denoise_pretrain.adapters.io.csv_rows import write_dict_csv
from denoise_pretrain.domain.structure import (
    Dataset,
    composition_counts,
    composition_overlap,
    element_coverage,
)
from denoise_pretrain.filesystem.runtree import RunTree
from denoise_pretrain.interface import face

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Request:
    upstream: Dataset
    downstream: Dataset
    run_tree: RunTree | None = None


@dataclass(frozen=True)
class Result:
    rows: tuple[dict[str, Any], ...]
    summary_path: Path | None
    compositions_path: Path | None
    coverage: float
    overlap: float
    code: int = 0


def composition_key(composition: tuple[tuple[str, int], ...]) -> str:
    return "".join(f"{symbol}{count}" for symbol, count in composition)


def _shared_labels(dataset: Dataset) -> list[str]:
    if len(dataset) == 0:
        return []
    shared = set(dataset[0].labels)
    for structure in dataset:
        shared &= set(structure.labels)
    return sorted(shared)


def describe(dataset: Dataset) -> list[dict[str, Any]]:
    sizes = np.array([s.n_atoms for s in dataset])
    rows: list[dict[str, Any]] = [
        {"dataset": dataset.name, "metric": "structures", "value": len(dataset)},
        {"dataset": dataset.name, "metric": "atoms_min", "value": int(sizes.min())},
        {"dataset": dataset.name, "metric": "atoms_max", "value": int(sizes.max())},
        {"dataset": dataset.name, "metric": "atoms_mean", "value": float(sizes.mean())},
        {
            "dataset": dataset.name,
            "metric": "elements",
            "value": " ".join(sorted(dataset.element_counts())),
        },
        {"dataset": dataset.name, "metric": "compositions", "value": len(composition_counts(dataset))},
    ]
    for label in _shared_labels(dataset):
        values = dataset.label_values(label)
        rows.append({"dataset": dataset.name, "metric": f"{label}_mean", "value": float(values.mean())})
        rows.append({"dataset": dataset.name, "metric": f"{label}_std", "value": float(values.std())})
    return rows


class DatasetStatsBridge:
    def run(self, request: Request) -> Result:
        with face.phase(1, 2, "describing datasets"):
            rows = describe(request.upstream) + describe(request.downstream)
            coverage = element_coverage(request.upstream, request.downstream)
            overlap = composition_overlap(request.upstream, request.downstream)
            pair = f"{request.upstream.name}->{request.downstream.name}"
            rows.append({"dataset": pair, "metric": "element_coverage", "value": coverage})
            rows.append({"dataset": pair, "metric": "composition_overlap", "value": overlap})

        summary_path = compositions_path = None
        with face.phase(2, 2, "writing tables"):
            if request.run_tree is not None:
                up = composition_counts(request.upstream)
                down = composition_counts(request.downstream)
                keys = sorted(set(up) | set(down), key=lambda c: (-(up[c] + down[c]), composition_key(c)))
                table = [
                    {"composition": composition_key(c), "upstream": up[c], "downstream": down[c]}
                    for c in keys
                ]
                summary_path = write_dict_csv(request.run_tree.dataset_path("summary.csv"), rows)
                compositions_path = write_dict_csv(request.run_tree.dataset_path("compositions.csv"), table)

        LOGGER.info("element coverage %.3f, composition overlap %.3f", coverage, overlap)
        return Result(
            rows=tuple(rows),
            summary_path=summary_path,
            compositions_path=compositions_path,
            coverage=coverage,
            overlap=overlap,
        )
