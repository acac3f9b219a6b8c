""" denoise_pretrain.bridges.runs.evaluation

    PURPOSE:
        - evaluate: MAE of a fine-tuned checkpoint on labelled structures

    BEHAVIOR:
        - the model, featurizer, batch caps and target label come from the
          config stored in the checkpoint; label statistics from its state
        - weights: "ema" (default), "best" (best validation snapshot) or
          "params" (raw optimizer weights)
        - without an explicit XYZ file the downstream test split of the
          stored config is used
        - per-structure predictions are written to metrics/evaluation.csv

    PUBLIC:
        - WEIGHTS
        - Request
        - Result
        - EvaluateBridge
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from denoise_pretrain.adapters.io.checkpoint import Checkpoint, load_checkpoint, restore_into
from denoise_pretrain.adapters.io.csv_rows import write_dict_csv
from denoise_pretrain.adapters.io.xyz import read_xyz_file
from denoise_pretrain.bridges.datasets.loading import downstream_dataset
from denoise_pretrain.domain.config import Config
from denoise_pretrain.domain.structure import Dataset, LabelStats, split_dataset
from denoise_pretrain.errors import CheckpointError, ContractViolation
from denoise_pretrain.filesystem.runtree import RunTree
from denoise_pretrain.interface import face
from denoise_pretrain.neural.gns import GraphNetSimulator
from denoise_pretrain.training.evaluate import predict_labels
from denoise_pretrain.training.pipeline import RunSpec

WEIGHTS = ("ema", "best", "params")


@dataclass(frozen=True)
class Request:
    checkpoint: Path
    data: Path | None = None
    weights: str = "ema"
    run_tree: RunTree | None = None
    threads: int = 1


@dataclass(frozen=True)
class Result:
    dataset: str
    label: str
    weights: str
    n_structures: int
    mae: float
    step: int
    predictions_path: Path | None
    code: int = 0


def _stats(checkpoint: Checkpoint) -> LabelStats:
    stats = checkpoint.state.get("stats")
    if not stats:
        raise ContractViolation("checkpoint carries no target statistics; evaluate a fine-tuned checkpoint")
    return LabelStats(float(stats["mean"]), float(stats["std"]))


def _arrays(checkpoint: Checkpoint, weights: str) -> dict[str, np.ndarray]:
    if weights not in WEIGHTS:
        raise ContractViolation(f"weights must be one of {', '.join(WEIGHTS)}, got {weights!r}")
    arrays = getattr(checkpoint, weights)
    if not arrays:
        raise CheckpointError(f"checkpoint holds no {weights!r} weights")
    return arrays


class EvaluateBridge:
    def _dataset(self, request: Request, spec: RunSpec) -> Dataset:
        if request.data is not None:
            return read_xyz_file(request.data)
        full = downstream_dataset(spec.data, spec.train.seed, request.threads)
        _, _, test = split_dataset(len(full), spec.data.fractions, spec.train.seed).apply(full)
        return test

    def run(self, request: Request) -> Result:
        with face.phase(1, 3, "loading checkpoint"):
            checkpoint = load_checkpoint(request.checkpoint)
            spec = RunSpec.from_config(Config.from_json(checkpoint.config_json))
            stats = _stats(checkpoint)
            model = GraphNetSimulator(spec.model)
            store = model.init_params(np.random.default_rng(0))
            restore_into(store, _arrays(checkpoint, request.weights))

        with face.phase(2, 3, "loading structures"):
            dataset = self._dataset(request, spec)
            label = spec.data.target_label
            truth = dataset.label_values(label)

        with face.phase(3, 3, f"predicting {label}"):
            pred = predict_labels(
                model,
                store,
                dataset,
                spec.featurizer,
                spec.train.caps,
                spec.train.max_edges_per_vertex,
                stats,
            )
            mae = float(np.mean(np.abs(pred - truth)))

        path = None
        if request.run_tree is not None:
            rows = [
                {"index": i, "target": float(t), "prediction": float(p), "abs_error": float(abs(p - t))}
                for i, (t, p) in enumerate(zip(truth, pred))
            ]
            path = write_dict_csv(request.run_tree.metrics_path("evaluation.csv"), rows)

        return Result(
            dataset=dataset.name,
            label=label,
            weights=request.weights,
            n_structures=len(dataset),
            mae=mae,
            step=checkpoint.step,
            predictions_path=path,
        )
