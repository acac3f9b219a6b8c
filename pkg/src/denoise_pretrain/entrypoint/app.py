""" denoise_pretrain.entrypoint.app

    PURPOSE:
        - application command registry and dispatcher

    BEHAVIOR:
        - register commands by name; each one adds its own subparser
        - dispatch parsed args to the named command

    PUBLIC:
        - DenoiseApp
        - build_app() -> DenoiseApp
            - add commands here
"""

from __future__ import annotations

import argparse
from typing import Dict, Iterable

from denoise_pretrain.commands.base import Command
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.errors import ContractViolation


class DenoiseApp:
    def __init__(self, cmds: Iterable[Command]) -> None:
        self._commands: Dict[str, Command] = {}
        for command in cmds:
            if command.name in self._commands:
                raise ValueError(f"duplicate command: {command.name}")
            self._commands[command.name] = command

    @property
    def names(self) -> list[str]:
        return list(self._commands)

    def register(self, subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]") -> None:
        for name, command in self._commands.items():
            summary = command.summary
            sub = subparsers.add_parser(
                name,
                help=summary,
                description=getattr(getattr(command, "builder", None), "help", summary),
                formatter_class=argparse.RawDescriptionHelpFormatter,
            )
            command.add_arguments(sub)

    def run(self, args: argparse.Namespace, ctx: CommandContext) -> int:
        command = self._commands.get(args.command)
        if command is None:
            raise ContractViolation(f"unknown command {args.command!r}; commands: {', '.join(self.names)}")
        return command.run(args, ctx)


def build_app() -> DenoiseApp:
    from denoise_pretrain.commands.builders.dataset_stats_cmd import DatasetStatsCommand
    from denoise_pretrain.commands.builders.diagnose_cmd import DiagnoseCommand
    from denoise_pretrain.commands.builders.evaluate_cmd import EvaluateCommand
    from denoise_pretrain.commands.builders.finetune_cmd import FinetuneCommand
    from denoise_pretrain.commands.builders.make_synthetic_cmd import MakeSyntheticCommand
    from denoise_pretrain.commands.builders.oracle_check_cmd import OracleCheckCommand
    from denoise_pretrain.commands.builders.pretrain_cmd import PretrainCommand

    return DenoiseApp(
        [
            PretrainCommand,
            FinetuneCommand,
            EvaluateCommand,
            DiagnoseCommand,
            OracleCheckCommand,
            DatasetStatsCommand,
            MakeSyntheticCommand,
        ]
    )
