""" denoise_pretrain.bridges.runs.training

    PURPOSE:
        - pretrain / finetune commands: load data and checkpoints, run the
          trainer, summarize

    BEHAVIOR:
        - pretrain reads the upstream dataset, the fine-tuning modes the
          downstream one
        - an init checkpoint seeds the backbone; a resume checkpoint
          continues an interrupted run of the same mode
        - metrics land in metrics/<mode>.csv, checkpoints in checkpoints/

    PUBLIC:
        - Request
        - Result
        - TrainingBridge
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from denoise_pretrain.adapters.io.checkpoint import load_checkpoint
from denoise_pretrain.bridges.datasets.loading import downstream_dataset, upstream_dataset
from denoise_pretrain.domain.structure import Dataset
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.filesystem.runtree import RunTree
from denoise_pretrain.interface import face
from denoise_pretrain.training.pipeline import RunSpec, Trainer

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Request:
    mode: str
    spec: RunSpec
    run_tree: RunTree
    checkpoint: Path | None = None
    resume: Path | None = None
    from_scratch: bool = False
    resolve: Callable[[Path], Path] | None = None


@dataclass(frozen=True)
class Result:
    mode: str
    dataset: str
    n_structures: int
    steps_done: int
    final_loss: float | None
    valid_mae: float | None
    test_mae: float | None
    stopped_early: bool
    checkpoint_path: Path | None
    metrics_path: Path
    code: int = 0


class TrainingBridge:
    def _dataset(self, request: Request) -> Dataset:
        data = request.spec.data
        seed, threads = request.spec.train.seed, request.spec.train.threads
        if request.mode == "pretrain":
            return upstream_dataset(data, seed, threads, request.resolve)
        return downstream_dataset(data, seed, threads, request.resolve)

    def run(self, request: Request) -> Result:
        if request.mode != "pretrain" and request.checkpoint is None and not request.from_scratch and request.resume is None:
            raise ContractViolation(f"{request.mode} needs --checkpoint (or --from-scratch for a random backbone)")

        with face.phase(1, 3, "loading data and checkpoints"):
            trainer = Trainer(request.spec, request.mode)
            dataset = self._dataset(request)
            init = load_checkpoint(request.checkpoint) if request.checkpoint is not None else None
            resume = load_checkpoint(request.resume) if request.resume is not None else None

        with face.phase(2, 3, f"{request.mode}: {trainer.train.steps} steps on {len(dataset)} structures"):
            result = trainer.run(
                dataset,
                init=init,
                resume=resume,
                tree=request.run_tree,
                from_scratch=request.from_scratch,
            )

        with face.phase(3, 3, "summarizing"):
            final = result.metrics[-1]["loss_total"] if result.metrics else None

        return Result(
            mode=request.mode,
            dataset=dataset.name,
            n_structures=len(dataset),
            steps_done=result.steps_done,
            final_loss=final,
            valid_mae=result.valid_mae,
            test_mae=result.test_mae,
            stopped_early=result.stopped_early,
            checkpoint_path=result.checkpoint_path,
            metrics_path=request.run_tree.metrics_path(f"{request.mode}.csv"),
        )
