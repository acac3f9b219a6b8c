FINETUNE_HELP = """
    fine-tune on the labelled downstream dataset

    usage: denoise-pretrain finetune (--checkpoint CKPT | --from-scratch) [--frozen] [--resume CKPT]

    The backbone starts from the checkpoint's EMA weights and the graph
    heads start fresh. The loss is the target MSE on standardized labels
    plus the weighted denoising term. Validation MAE drives early stopping;
    test MAE is reported with the best validation snapshot.

    options:
      --checkpoint CKPT
          Pre-trained checkpoint to start from.
      --from-scratch
          Start from a random backbone (baseline runs).
      --frozen
          Update decoder parameters only (finetune_frozen_backbone).
      --resume CKPT
          Continue an interrupted fine-tuning run.
    """

import argparse

from denoise_pretrain.bridges.runs.training import Request, Result, TrainingBridge
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder
from denoise_pretrain.commands.builders.pretrain_cmd import TrainingReporter, optional_path
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.training.pipeline import RunSpec


class BuildFinetuneRequest(RequestBuilder[Request]):
    help = FINETUNE_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        start = parser.add_mutually_exclusive_group()
        start.add_argument("--checkpoint", metavar="CKPT", help="pre-trained checkpoint for the backbone")
        start.add_argument("--from-scratch", action="store_true", help="random backbone baseline")
        parser.add_argument("--frozen", action="store_true", help="train decoder parameters only")
        parser.add_argument("--resume", metavar="CKPT", help="checkpoint of an interrupted fine-tuning run")

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        return Request(
            mode="finetune_frozen_backbone" if args.frozen else "finetune",
            spec=RunSpec.from_config(ctx.config),
            run_tree=ctx.run_tree,
            checkpoint=optional_path(args.checkpoint),
            resume=optional_path(args.resume),
            from_scratch=bool(args.from_scratch),
            resolve=ctx.resolve_path,
        )


FinetuneCommand: BridgeCommand[Request, Result] = BridgeCommand(
    name="finetune",
    builder=BuildFinetuneRequest(),
    bridge=TrainingBridge(),
    reporter=TrainingReporter(),
)
