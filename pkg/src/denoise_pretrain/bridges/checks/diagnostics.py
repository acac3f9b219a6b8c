""" denoise_pretrain.bridges.checks.diagnostics

    PURPOSE:
        - diagnose: initialization-time oversmoothing and edge q/c profiles
          of one variant at a chosen depth

    BEHAVIOR:
        - the configured model is rebuilt with depth message-passing layers
          and one block iteration, so the tailored slope is solved for the
          requested depth
        - the diagnostic batch is the first max_graphs_in_batch upstream
          structures at their clean positions; the same batch is used for
          every seed
        - oversmoothing_<variant>.csv: variant, seed, depth, mean_cosine
        - edge_qc_<variant>.csv: variant, seed, layer, q, c for random unit
          edge inputs and zero vertex features

    PUBLIC:
        - Request
        - Result
        - DiagnoseBridge
        - depth_model(config, variant, depth) -> GNSConfig
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from denoise_pretrain.adapters.io.csv_rows import write_dict_csv
from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.domain.structure import Dataset
from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.filesystem.runtree import RunTree
from denoise_pretrain.graph.batch import batch_graphs
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.graph.radius import build_graph
from denoise_pretrain.interface import face
from denoise_pretrain.neural.diagnostics import edge_network_profile, oversmoothing_profile
from denoise_pretrain.neural.gns import GraphNetSimulator
from denoise_pretrain.training.pipeline import INIT_STREAM

LOGGER = logging.getLogger(__name__)

EDGE_SAMPLES = 64


@dataclass(frozen=True)
class Request:
    model: GNSConfig
    featurizer: FeaturizerSpec
    dataset: Dataset
    variant: str
    depth: int
    seeds: tuple[int, ...]
    max_graphs: int
    max_edges_per_vertex: int
    run_tree: RunTree | None = None


@dataclass(frozen=True)
class Result:
    variant: str
    depth: int
    rows: tuple[dict[str, Any], ...]
    edge_rows: tuple[dict[str, Any], ...]
    final_cosine: float
    negative_slope: float | None
    profile_path: Path | None
    edge_path: Path | None
    code: int = 0


def depth_model(config: GNSConfig, variant: str, depth: int) -> GNSConfig:
    if depth < 1:
        raise ContractViolation(f"depth must be >= 1, got {depth}")
    deep = replace(config, variant=variant, n_mp_layers=depth, n_block_iterations=1).resolve()  # type: ignore[arg-type]
    deep.validate()
    return deep


class DiagnoseBridge:
    def run(self, request: Request) -> Result:
        with face.phase(1, 3, f"building {request.variant} at depth {request.depth}"):
            model = GraphNetSimulator(depth_model(request.model, request.variant, request.depth))
            head = request.dataset.structures[: request.max_graphs]
            if not head:
                raise ContractViolation("diagnose needs at least one structure")
            batch = batch_graphs(
                [build_graph(s, request.featurizer.r_cut, request.max_edges_per_vertex, request.featurizer) for s in head]
            )

        rows: list[dict[str, Any]] = []
        edge_rows: list[dict[str, Any]] = []
        with face.phase(2, 3, f"probing {len(request.seeds)} seed(s)"):
            for seed in request.seeds:
                rng = np.random.default_rng(np.random.SeedSequence([seed, INIT_STREAM]))
                store = model.init_params(rng)
                profile = oversmoothing_profile(model, store, batch, request.depth)
                rows.extend(
                    {"variant": request.variant, "seed": seed, "depth": t, "mean_cosine": value}
                    for t, value in enumerate(profile)
                )
                inputs = rng.standard_normal((EDGE_SAMPLES, model.config.latent))
                for layer, qc in enumerate(edge_network_profile(model, store, inputs)):
                    edge_rows.append({"variant": request.variant, "seed": seed, "layer": layer, "q": qc.q, "c": qc.c})

        profile_path = edge_path = None
        with face.phase(3, 3, "writing profiles"):
            if request.run_tree is not None:
                profile_path = write_dict_csv(
                    request.run_tree.diagnostics_path(f"oversmoothing_{request.variant}.csv"), rows
                )
                edge_path = write_dict_csv(request.run_tree.diagnostics_path(f"edge_qc_{request.variant}.csv"), edge_rows)

        final = float(np.mean([r["mean_cosine"] for r in rows if r["depth"] == request.depth]))
        slope = model.tailored.negative_slope if model.tailored is not None else None
        LOGGER.info("%s depth %d: mean cosine %.4f", request.variant, request.depth, final)
        return Result(
            variant=request.variant,
            depth=request.depth,
            rows=tuple(rows),
            edge_rows=tuple(edge_rows),
            final_cosine=final,
            negative_slope=slope,
            profile_path=profile_path,
            edge_path=edge_path,
        )
