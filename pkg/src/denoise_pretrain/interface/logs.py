""" denoise_pretrain.interface.logs

    PURPOSE:
        - route the package logger through rich on standard error

    PUBLIC:
        - configure_logging(level) -> logging.Logger
        - level_for(verbose, quiet) -> int
"""

from __future__ import annotations

import logging

from rich.logging import RichHandler

from denoise_pretrain.interface.interface import make_console

PACKAGE = "denoise_pretrain"


def level_for(verbose: bool = False, quiet: bool = False) -> int:
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return logging.INFO


def configure_logging(level: int = logging.INFO) -> logging.Logger:
    """ idempotent: a second call only changes the level """
    logger = logging.getLogger(PACKAGE)
    logger.setLevel(level)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=make_console(),
            show_path=False,
            rich_tracebacks=False,
            markup=False,
            log_time_format="[%X]",
        )
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    for handler in logger.handlers:
        handler.setLevel(level)
    return logger
