""" denoise_pretrain.entrypoint.cli

    PURPOSE:
        - entrypoint for the denoise-pretrain command line

    BEHAVIOR:
        - global options pick the config file, --set overrides, seed,
          threads, output directory and verbosity
        - builds the Config (defaults <- recipe <- file <- --set <- --seed /
          --threads), configures logging, dispatches the subcommand
        - exit codes: 0 success; 1 validation or usage errors; 2 any other
          failure; diagnostics go to standard error

    PUBLIC:
        - build_parser(app) -> argparse.ArgumentParser
        - main(argv=None) -> int
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn, Optional

from denoise_pretrain.commands.context import FALLBACKS, CommandContext
from denoise_pretrain.domain.config import Config
from denoise_pretrain.domain.config.schema import parse_overrides
from denoise_pretrain.entrypoint.app import DenoiseApp, build_app
from denoise_pretrain.errors import VALIDATION_ERRORS
from denoise_pretrain.interface import face
from denoise_pretrain.interface.logs import configure_logging, level_for

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2


class Parser(argparse.ArgumentParser):
    """ usage errors exit with the validation code """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser(app: DenoiseApp) -> Parser:
    parser = Parser(
        prog="denoise-pretrain",
        description="denoising pre-training for 3D molecular property prediction",
    )
    parser.add_argument("--config", metavar="YAML", default=None, help="yaml config file (default: built-in defaults)")
    parser.add_argument(
        "--set",
        dest="overrides",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="override any config key by its flat name; repeatable",
    )
    parser.add_argument("--recipe", default=None, help="built-in hyperparameter preset applied before the file")
    parser.add_argument("--seed", type=int, default=None, help="seed for all randomness (default: config seed, 0)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for data preparation")
    parser.add_argument("--out", metavar="DIR", default=FALLBACKS["out_dir"], help="output directory")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True, parser_class=Parser)
    app.register(subparsers)
    return parser


def load_config(args: argparse.Namespace) -> Config:
    overrides = parse_overrides(args.overrides)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    return Config.load(args.config, overrides, recipe=args.recipe)


def main(argv: Optional[list[str]] = None) -> int:
    app = build_app()
    try:
        args = build_parser(app).parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID

    configure_logging(level_for(args.verbose, args.quiet))
    face.quiet = bool(args.quiet)
    try:
        config = load_config(args)
        ctx = CommandContext(config=config, out_dir=Path(args.out).expanduser())
        return app.run(args, ctx)
    except VALIDATION_ERRORS as exc:
        face.error(f"error: {exc}")
        return EXIT_INVALID
    except KeyboardInterrupt:
        face.error("interrupted")
        return EXIT_FAILED
    except Exception as exc:
        LOGGER.debug("command failed", exc_info=True)
        face.error(f"failed: {type(exc).__name__}: {exc}")
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
