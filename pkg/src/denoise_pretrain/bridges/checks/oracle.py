""" denoise_pretrain.bridges.checks.oracle

    PURPOSE:
        - oracle-check: compare score-matching and denoising gradients on a
          random Gaussian mixture with a small score network

    BEHAVIOR:
        - mixture centers, score-network weights and the Monte-Carlo samples all
          derive from one seed
        - the report row is written to diagnostics/oracle_check.csv

    PUBLIC:
        - Request
        - Result
        - OracleBridge
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from denoise_pretrain.adapters.io.csv_rows import write_dict_csv
from denoise_pretrain.filesystem.runtree import RunTree
from denoise_pretrain.interface import face
from denoise_pretrain.oracle.equivalence import GapReport, init_score_network, j1_j2_gradient_gap
from denoise_pretrain.oracle.score import random_mixture

MIXTURE_STREAM = 3


@dataclass(frozen=True)
class Request:
    n_centers: int
    n_atoms: int
    sigma: float
    n_samples: int
    seed: int
    hidden: int = 16
    spread: float | None = None
    run_tree: RunTree | None = None


@dataclass(frozen=True)
class Result:
    report: GapReport
    row: dict[str, Any]
    within: bool
    path: Path | None
    code: int = 0


class OracleBridge:
    def run(self, request: Request) -> Result:
        with face.phase(1, 2, f"mixture of {request.n_centers} centers over {request.n_atoms} atoms"):
            rng = np.random.default_rng(np.random.SeedSequence([request.seed, MIXTURE_STREAM]))
            mixture = random_mixture(request.n_centers, request.n_atoms, request.sigma, rng, request.spread)
            params = init_score_network(3 * request.n_atoms, request.hidden, rng)

        with face.phase(2, 2, f"gradients over {request.n_samples} samples"):
            report = j1_j2_gradient_gap(params, mixture, request.n_samples, request.seed)

        row = {
            "centers": request.n_centers,
            "atoms": request.n_atoms,
            "sigma": request.sigma,
            "seed": request.seed,
            **report.to_record(),
        }
        path = None
        if request.run_tree is not None:
            path = write_dict_csv(request.run_tree.diagnostics_path("oracle_check.csv"), [row])
        return Result(report=report, row=row, within=report.within(3.0), path=path)
