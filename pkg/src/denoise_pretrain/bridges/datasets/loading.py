""" denoise_pretrain.bridges.datasets.loading

    PURPOSE:
        - resolve the upstream / downstream datasets a command works on

    BEHAVIOR:
        - a configured path is read as extended XYZ
        - no path means the bundled synthetic generator: upstream uses the
          run seed, downstream seed + 1, so the two sets never coincide
        - relative paths resolve against the config file's directory

    PUBLIC:
        - upstream_dataset(spec, seed, threads, resolve) -> Dataset
        - downstream_dataset(spec, seed, threads, resolve) -> Dataset
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable

from denoise_pretrain.adapters.io.xyz import read_xyz_file
from denoise_pretrain.bridges.specs.data import DataSpec
from denoise_pretrain.domain.structure import Dataset
from denoise_pretrain.domain.synthetic import make_synthetic_dataset

LOGGER = logging.getLogger(__name__)

Resolver = Callable[[Path], Path]


def _from_spec(
    path: Path | None,
    size: int,
    seed: int,
    spec: DataSpec,
    threads: int,
    name: str,
    resolve: Resolver | None,
) -> Dataset:
    if path is not None:
        return read_xyz_file(resolve(path) if resolve else path, name=name)
    LOGGER.info("no %s path configured; generating %d synthetic structures", name, size)
    return make_synthetic_dataset(
        size,
        seed,
        elements=spec.synthetic_elements,
        include_initial=spec.include_initial,
        threads=threads,
        name=name,
    )


def upstream_dataset(
    spec: DataSpec,
    seed: int = 0,
    threads: int = 1,
    resolve: Resolver | None = None,
) -> Dataset:
    return _from_spec(spec.upstream_path, spec.synthetic_upstream_size, seed, spec, threads, "upstream", resolve)


def downstream_dataset(
    spec: DataSpec,
    seed: int = 0,
    threads: int = 1,
    resolve: Resolver | None = None,
) -> Dataset:
    return _from_spec(
        spec.downstream_path, spec.synthetic_downstream_size, seed + 1, spec, threads, "downstream", resolve
    )
