""" denoise_pretrain.filesystem.runtree

holds the output layout of one run

    PUBLIC
    -------
    @classmethod
    RunTree.plant(root: str | Path) -> RunTree
    RunTree.ensure() -> RunTree

    methods:
    --------
    checkpoint_path(step) -> Path
    final_checkpoint_path() -> Path
    metrics_path(name) -> Path
    diagnostics_path(name) -> Path
    dataset_path(name) -> Path

    """

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass
class TreeLayout:
    version: str = "layout-v1"

    def checkpoints_dir(self, root: Path) -> Path:
        return root / "checkpoints"

    def metrics_dir(self, root: Path) -> Path:
        return root / "metrics"

    def diagnostics_dir(self, root: Path) -> Path:
        return root / "diagnostics"

    def datasets_dir(self, root: Path) -> Path:
        return root / "datasets"

    def dirs(self, root: Path) -> tuple[Path, ...]:
        return (
            self.checkpoints_dir(root),
            self.metrics_dir(root),
            self.diagnostics_dir(root),
            self.datasets_dir(root),
        )


@dataclass
class RunTree:
    root: Path
    layout: TreeLayout

    @classmethod
    def plant(cls, root: str | Path, layout: TreeLayout | None = None) -> "RunTree":
        """ plant a tree at root and create its directories """
        tree = cls(root=Path(root).expanduser().resolve(), layout=layout or TreeLayout())
        return tree.ensure()

    @property
    def exists(self) -> bool:
        return self.root.exists()

    def ensure(self) -> "RunTree":
        self.root.mkdir(parents=True, exist_ok=True)
        for path in self.layout.dirs(self.root):
            path.mkdir(parents=True, exist_ok=True)
        return self

    def checkpoint_path(self, step: int) -> Path:
        return self.layout.checkpoints_dir(self.root) / f"step_{step:08d}.safetensors"

    def final_checkpoint_path(self) -> Path:
        return self.layout.checkpoints_dir(self.root) / "final.safetensors"

    def metrics_path(self, name: str = "metrics.csv") -> Path:
        return self.layout.metrics_dir(self.root) / name

    def diagnostics_path(self, name: str) -> Path:
        return self.layout.diagnostics_dir(self.root) / name

    def dataset_path(self, name: str) -> Path:
        return self.layout.datasets_dir(self.root) / name
