"""denoise_pretrain.commands.bridge

command layer utilities for translating parsed arguments into typed requests

args + context
    -> RequestBuilder -> Request -> Bridge.run() -> Result -> ResultReporter -> exit code

"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from typing import Generic, Protocol, TypeVar

from denoise_pretrain.commands.base import Command
from denoise_pretrain.commands.context import CommandContext

# accepts and returns T -> invariant
RequestType = TypeVar("RequestType")
ResultType = TypeVar("ResultType")

# returns T only -> covariant
RequestType_co = TypeVar("RequestType_co", covariant=True)
ResultType_co = TypeVar("ResultType_co", covariant=True)

# accepts T only -> contravariant
RequestType_contra = TypeVar("RequestType_contra", contravariant=True)
ResultType_contra = TypeVar("ResultType_contra", contravariant=True)


class RequestBuilder(Protocol[RequestType_co]):
    """
    registers the flags of one subcommand and turns the parsed namespace
    plus the shared context into a typed request
    """

    help: str

    def add_arguments(self, parser: argparse.ArgumentParser) -> None: ...

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> RequestType_co: ...


class Bridge(Protocol[RequestType_contra, ResultType_co]):
    """
    intermediate layer receiving typed requests, calling the domain and
    returning a typed result
    """

    def run(self, request: RequestType_contra) -> ResultType_co: ...


class ResultReporter(Protocol[ResultType_contra]):
    """
    converts a bridge result into user facing output and an exit code;
    keeps all ui above the bridge
    """

    def report(self, result: ResultType_contra) -> int: ...


@dataclass
class BridgeCommand(Command, Generic[RequestType, ResultType]):
    """
    generic command wrapper

        request = builder.from_args(args, ctx)
        result = bridge.run(request)
        return reporter.report(result)
    """

    name: str
    builder: RequestBuilder[RequestType]
    bridge: Bridge[RequestType, ResultType]
    reporter: ResultReporter[ResultType]

    @property
    def summary(self) -> str:
        return self.builder.help.strip().splitlines()[0] if self.builder.help.strip() else self.name

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        self.builder.add_arguments(parser)

    def run(self, args: argparse.Namespace, ctx: CommandContext) -> int:
        request = self.builder.from_args(args, ctx)
        result = self.bridge.run(request)
        return self.reporter.report(result)
