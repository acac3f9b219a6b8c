MAKE_SYNTHETIC_HELP = """
    generate a synthetic dataset of surrogate-relaxed structures

    usage: denoise-pretrain make-synthetic [--size N] [--output XYZ] [--include-initial]

    Structures are drawn from the configured synthetic elements, relaxed
    under the surrogate pair potential and labelled with surrogate_energy
    and dipole_norm. --include-initial keeps the random starting frame as
    the positions and stores the relaxed frame in three extra columns.
    """

import argparse
from pathlib import Path

from denoise_pretrain.bridges.datasets.synthetic import MakeSyntheticBridge, Request, Result
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder, ResultReporter
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.interface import face


class BuildMakeSyntheticRequest(RequestBuilder[Request]):
    help = MAKE_SYNTHETIC_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--size", type=int, default=None, help="structures (default synthetic_upstream_size)")
        parser.add_argument("--output", metavar="XYZ", default=None, help="file (default <out>/datasets/synthetic.xyz)")
        parser.add_argument(
            "--include-initial",
            action="store_true",
            default=None,
            help="keep the starting frame alongside the relaxed one",
        )

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        data = ctx.data
        out = Path(args.output).expanduser() if args.output else ctx.run_tree.dataset_path("synthetic.xyz")
        return Request(
            n_structures=args.size if args.size is not None else data.synthetic_upstream_size,
            seed=ctx.seed,
            elements=data.synthetic_elements,
            include_initial=data.include_initial if args.include_initial is None else True,
            out_path=out,
            threads=ctx.threads,
        )


class MakeSyntheticReporter(ResultReporter[Result]):
    def report(self, result: Result) -> int:
        face.row("structures", result.n_structures)
        face.row("atoms", result.n_atoms)
        face.row("labels", ", ".join(result.labels))
        if result.with_pairs:
            face.row("relaxed frames", "pair_positions=T, columns 5-7")
        face.row("written", result.path)
        return result.code


MakeSyntheticCommand = BridgeCommand(
    name="make-synthetic",
    builder=BuildMakeSyntheticRequest(),
    bridge=MakeSyntheticBridge(),
    reporter=MakeSyntheticReporter(),
)
