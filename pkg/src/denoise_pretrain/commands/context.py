"""denoise_pretrain.commands.context

    shared context for every subcommand

"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from denoise_pretrain.bridges.specs.data import DataSpec
from denoise_pretrain.domain.config import Config
from denoise_pretrain.filesystem.runtree import RunTree, TreeLayout

FALLBACKS: dict[str, str] = {
    "out_dir": "./runs/dev",
}


@dataclass(frozen=True)
class CommandContext:
    """
    properties
    ----------
    seed -> int
    threads -> int
    data -> DataSpec
    run_tree -> RunTree (planted on first access)

    methods
    -------
    value(key, default) -> Any
    resolve_path(value) -> Path
    """

    config: Config
    out_dir: Path = Path(FALLBACKS["out_dir"])

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def threads(self) -> int:
        return int(self.config.get("threads", 1))

    @property
    def data(self) -> DataSpec:
        return DataSpec.from_config(self.config)

    @property
    def run_tree(self) -> RunTree:
        return RunTree.plant(self.out_dir, layout=TreeLayout())

    def value(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def resolve_path(self, value: str | Path) -> Path:
        """ relative paths resolve against the config file's directory when there is one """
        path = Path(value).expanduser()
        if path.is_absolute():
            return path.resolve()
        base = self.config.source.parent if self.config.source is not None else Path.cwd()
        return (base / path).resolve()
