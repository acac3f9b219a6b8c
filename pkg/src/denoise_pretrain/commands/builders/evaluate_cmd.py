EVALUATE_HELP = """
    MAE of a fine-tuned checkpoint on labelled structures

    usage: denoise-pretrain evaluate --checkpoint CKPT [--data XYZ] [--weights ema|best|params]

    Model and target label come from the config stored in the checkpoint.
    Without --data the downstream test split of that config is used.
    Prints one CSV row (dataset,label,weights,n_structures,step,mae).
    """

import argparse
import sys
from pathlib import Path

from denoise_pretrain.adapters.io.csv_rows import rows_to_text
from denoise_pretrain.bridges.runs.evaluation import WEIGHTS, EvaluateBridge, Request, Result
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder, ResultReporter
from denoise_pretrain.commands.builders.pretrain_cmd import optional_path
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.interface import face


class BuildEvaluateRequest(RequestBuilder[Request]):
    help = EVALUATE_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--checkpoint", metavar="CKPT", required=True, help="fine-tuned checkpoint")
        parser.add_argument("--data", metavar="XYZ", help="labelled extended-XYZ file")
        parser.add_argument("--weights", choices=WEIGHTS, default="ema", help="which weights to evaluate")

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        return Request(
            checkpoint=Path(args.checkpoint).expanduser(),
            data=optional_path(args.data),
            weights=args.weights,
            run_tree=ctx.run_tree,
            threads=ctx.threads,
        )


class EvaluateReporter(ResultReporter[Result]):
    def report(self, result: Result) -> int:
        row = {
            "dataset": result.dataset,
            "label": result.label,
            "weights": result.weights,
            "n_structures": result.n_structures,
            "step": result.step,
            "mae": result.mae,
        }
        sys.stdout.write(rows_to_text([row]))
        face.row("MAE", f"{result.mae:.6g} ({result.label}, {result.n_structures} structures)")
        if result.predictions_path is not None:
            face.row("predictions", result.predictions_path)
        return result.code


EvaluateCommand = BridgeCommand(
    name="evaluate",
    builder=BuildEvaluateRequest(),
    bridge=EvaluateBridge(),
    reporter=EvaluateReporter(),
)
