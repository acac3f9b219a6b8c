"""denoise_pretrain.commands.base

    PURPOSE:
        - command interface for the subcommand dispatcher

    BEHAVIOR:
        - every command names itself, registers its own flags on an argparse
          subparser and runs against parsed args plus a CommandContext

    PUBLIC:
        - Command(ABC)

"""

from __future__ import annotations

import argparse
from abc import ABC, abstractmethod

from denoise_pretrain.commands.context import CommandContext


class Command(ABC):
    """base interface for all commands"""

    name: str
    summary: str = ""

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        raise NotImplementedError

    @abstractmethod
    def run(self, args: argparse.Namespace, ctx: CommandContext) -> int:
        raise NotImplementedError
