""" denoise_pretrain.errors

    PURPOSE:
        - one exception hierarchy for the package so the cli can map
          failures onto exit codes

    PUBLIC:
        - DenoiseError
        - ContractViolation
        - ParseError
        - ConfigError
        - BatchCapError
        - NonFiniteGradientError
        - CheckpointError
        - SolverError
        - VALIDATION_ERRORS
"""

from __future__ import annotations


class DenoiseError(Exception):
    """root of every error raised on purpose by denoise_pretrain"""


class ContractViolation(DenoiseError, ValueError):
    """shape, domain or precondition failure"""


class ParseError(DenoiseError, ValueError):
    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigError(DenoiseError, ValueError):
    pass


class BatchCapError(DenoiseError, ValueError):
    def __init__(self, cap: str, limit: int, size: int) -> None:
        super().__init__(f"single graph exceeds {cap}: {size} > {limit}")
        self.cap = cap
        self.limit = limit
        self.size = size


class NonFiniteGradientError(DenoiseError, FloatingPointError):
    def __init__(self, parameter: str) -> None:
        super().__init__(f"non-finite gradient for parameter {parameter!r}; step aborted")
        self.parameter = parameter


class CheckpointError(DenoiseError):
    pass


class SolverError(DenoiseError):
    pass


# exit code 1 at the cli
VALIDATION_ERRORS: tuple[type[BaseException], ...] = (
    ConfigError,
    ParseError,
    ContractViolation,
    BatchCapError,
    FileNotFoundError,
)
