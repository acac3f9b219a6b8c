DIAGNOSE_HELP = """
    initialization-time oversmoothing and edge q/c profiles

    usage: denoise-pretrain diagnose --variant gns|gns_tat [--depth N] [--seeds K]

    The configured model is rebuilt with N message-passing layers. Writes
    <out>/diagnostics/oversmoothing_<variant>.csv and edge_qc_<variant>.csv
    and prints the oversmoothing table as CSV.
    """

import argparse
import sys
from dataclasses import replace

from denoise_pretrain.adapters.io.csv_rows import rows_to_text
from denoise_pretrain.bridges.datasets.loading import upstream_dataset
from denoise_pretrain.bridges.checks.diagnostics import DiagnoseBridge, Request, Result
from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.bridges.specs.training import BatchCaps
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder, ResultReporter
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.interface import face


class BuildDiagnoseRequest(RequestBuilder[Request]):
    help = DIAGNOSE_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--variant", choices=("gns", "gns_tat"), required=True, help="model variant")
        parser.add_argument("--depth", type=int, default=30, help="message-passing steps to trace (default 30)")
        parser.add_argument("--seeds", type=int, default=1, help="initializations averaged (default 1)")

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        caps = BatchCaps.from_config(ctx.config)
        data = ctx.data
        small = replace(data, synthetic_upstream_size=min(data.synthetic_upstream_size, caps.max_graphs))
        return Request(
            model=GNSConfig.from_config(ctx.config),
            featurizer=FeaturizerSpec.from_config(ctx.config),
            dataset=upstream_dataset(small, ctx.seed, ctx.threads, ctx.resolve_path),
            variant=args.variant,
            depth=args.depth,
            seeds=tuple(ctx.seed + k for k in range(max(1, args.seeds))),
            max_graphs=caps.max_graphs,
            max_edges_per_vertex=int(ctx.config["max_edges_per_vertex"]),
            run_tree=ctx.run_tree,
        )


class DiagnoseReporter(ResultReporter[Result]):
    def report(self, result: Result) -> int:
        sys.stdout.write(rows_to_text(list(result.rows)))
        face.row("variant", result.variant)
        if result.negative_slope is not None:
            face.row("tailored slope", f"{result.negative_slope:.6f}")
        face.row(f"mean cosine at depth {result.depth}", f"{result.final_cosine:.4f}")
        if result.profile_path is not None:
            face.row("profile", result.profile_path)
            face.row("edge q/c", result.edge_path)
        return result.code


DiagnoseCommand = BridgeCommand(
    name="diagnose",
    builder=BuildDiagnoseRequest(),
    bridge=DiagnoseBridge(),
    reporter=DiagnoseReporter(),
)
