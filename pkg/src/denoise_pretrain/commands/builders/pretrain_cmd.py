PRETRAIN_HELP = """
    denoising pre-training on the upstream dataset

    usage: denoise-pretrain pretrain [--resume CKPT]

    Labels are ignored. The loss is the position denoising term plus the
    masked atom-type term. Metrics go to <out>/metrics/pretrain.csv and the
    final checkpoint to <out>/checkpoints/final.safetensors.

    options:
      --resume CKPT
          Continue an interrupted pretrain run from one of its checkpoints.
    """

import argparse
from pathlib import Path

from denoise_pretrain.bridges.runs.training import Request, Result, TrainingBridge
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder, ResultReporter
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.interface import face
from denoise_pretrain.training.pipeline import RunSpec


def optional_path(value: str | None) -> Path | None:
    return Path(value).expanduser() if value else None


class BuildPretrainRequest(RequestBuilder[Request]):
    help = PRETRAIN_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--resume", metavar="CKPT", help="checkpoint of an interrupted pretrain run")

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        return Request(
            mode="pretrain",
            spec=RunSpec.from_config(ctx.config),
            run_tree=ctx.run_tree,
            resume=optional_path(args.resume),
            resolve=ctx.resolve_path,
        )


class TrainingReporter(ResultReporter[Result]):
    def report(self, result: Result) -> int:
        face.row("mode", result.mode)
        face.row("dataset", f"{result.dataset} ({result.n_structures} structures)")
        face.row("steps", result.steps_done)
        if result.final_loss is not None:
            face.row("final loss", f"{result.final_loss:.6g}")
        if result.valid_mae is not None:
            face.row("best valid MAE", f"{result.valid_mae:.6g}")
        if result.test_mae is not None:
            face.row("test MAE", f"{result.test_mae:.6g}")
        if result.stopped_early:
            face.warning("stopped early on validation MAE")
        face.row("metrics", result.metrics_path)
        if result.checkpoint_path is not None:
            face.row("checkpoint", result.checkpoint_path)
        return result.code


PretrainCommand = BridgeCommand(
    name="pretrain",
    builder=BuildPretrainRequest(),
    bridge=TrainingBridge(),
    reporter=TrainingReporter(),
)
