DATASET_STATS_HELP = """
    upstream / downstream dataset statistics

    usage: denoise-pretrain dataset-stats

    Element coverage and composition overlap between the configured
    upstream and downstream datasets, plus per-dataset size and label
    statistics. Prints the summary as CSV and writes summary.csv and
    compositions.csv under <out>/datasets/.
    """

import argparse
import sys

from denoise_pretrain.adapters.io.csv_rows import rows_to_text
from denoise_pretrain.bridges.datasets.loading import downstream_dataset, upstream_dataset
from denoise_pretrain.bridges.datasets.stats import DatasetStatsBridge, Request, Result
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder, ResultReporter
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.interface import face


class BuildDatasetStatsRequest(RequestBuilder[Request]):
    help = DATASET_STATS_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        return None

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        data = ctx.data
        return Request(
            upstream=upstream_dataset(data, ctx.seed, ctx.threads, ctx.resolve_path),
            downstream=downstream_dataset(data, ctx.seed, ctx.threads, ctx.resolve_path),
            run_tree=ctx.run_tree,
        )


class DatasetStatsReporter(ResultReporter[Result]):
    def report(self, result: Result) -> int:
        sys.stdout.write(rows_to_text(list(result.rows)))
        face.row("element coverage", f"{result.coverage:.3f}")
        face.row("composition overlap", f"{result.overlap:.3f}")
        if result.summary_path is not None:
            face.row("summary", result.summary_path)
            face.row("compositions", result.compositions_path)
        return result.code


DatasetStatsCommand = BridgeCommand(
    name="dataset-stats",
    builder=BuildDatasetStatsRequest(),
    bridge=DatasetStatsBridge(),
    reporter=DatasetStatsReporter(),
)
