""" denoise_pretrain.bridges.datasets.synthetic

    PURPOSE:
        - make-synthetic: generate surrogate-relaxed structures and write
          them as extended XYZ

    PUBLIC:
        - Request
        - Result
        - MakeSyntheticBridge
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from denoise_pretrain.adapters.io.xyz import write_xyz_file
from denoise_pretrain.domain.synthetic import make_synthetic_dataset
from denoise_pretrain.interface import face


@dataclass(frozen=True)
class Request:
    n_structures: int
    seed: int
    elements: tuple[str, ...]
    include_initial: bool
    out_path: Path
    threads: int = 1


@dataclass(frozen=True)
class Result:
    path: Path
    n_structures: int
    n_atoms: int
    labels: tuple[str, ...]
    with_pairs: bool
    code: int = 0


class MakeSyntheticBridge:
    def run(self, request: Request) -> Result:
        with face.phase(1, 2, f"relaxing {request.n_structures} structures"):
            dataset = make_synthetic_dataset(
                request.n_structures,
                request.seed,
                elements=request.elements,
                include_initial=request.include_initial,
                threads=request.threads,
                name=request.out_path.stem,
            )
        with face.phase(2, 2, "writing xyz"):
            path = write_xyz_file(request.out_path, dataset)
        return Result(
            path=path,
            n_structures=len(dataset),
            n_atoms=sum(s.n_atoms for s in dataset),
            labels=tuple(sorted(dataset[0].labels)),
            with_pairs=request.include_initial,
        )
