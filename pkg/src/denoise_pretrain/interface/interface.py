# rich (UI / logging)
from __future__ import annotations

import os
import shutil
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

from rich.console import Console
from rich.markup import escape


def get_width() -> int:
    return int(
        os.environ.get(
            "DP_WIDTH",
            shutil.get_terminal_size(fallback=(120, 24)).columns,
        )
    )


def make_console() -> Console:
    """ standard error only; standard output is kept for CSV """
    return Console(width=get_width(), stderr=True)


@dataclass
class Theme:
    text: str = "white"
    info: str = "bold white"
    warn: str = "yellow"
    error: str = "bold red"
    success: str = "bold green"


@dataclass
class Interface:
    """
    Terminal face for human-facing status lines. Everything goes to standard
    error through one rich Console; quiet silences everything but errors.
    """

    _console: Console = field(default_factory=make_console)
    theme: Theme = field(default_factory=Theme)
    quiet: bool = False

    def _emit(self, style: str, message: Any) -> None:
        if not self.quiet:
            self._console.print(f"[{style}]{escape(str(message))}[/]")

    def warning(self, message: Any) -> None:
        self._emit(self.theme.warn, message)

    def error(self, message: Any) -> None:
        self._console.print(f"[{self.theme.error}]{escape(str(message))}[/]", highlight=False)

    def success(self, message: Any) -> None:
        self._emit(self.theme.success, message)

    def format_s(self, seconds: float) -> str:
        if seconds < 1:
            return f"{seconds * 1000:.0f}ms"
        if seconds < 60:
            return f"{seconds:.2f}s"
        minutes = int(seconds // 60)
        rest = seconds % 60
        return f"{minutes}m {rest:.1f}s"

    def row(self, key: str, value: Any, *, key_style: str = "bold white", value_style: str | None = None) -> None:
        if self.quiet:
            return
        value_style = value_style or self.theme.text
        self._console.print(f"[{key_style}]{key}[/]: [{value_style}]{value}[/]")

    @contextmanager
    def phase(self, index: int, total: int, message: str) -> Iterator[None]:
        start = time.perf_counter()
        self._emit(self.theme.info, f"[{index}/{total}] {message}")
        try:
            yield
        except Exception:
            elapsed = time.perf_counter() - start
            self.error(f"failed {message} [{self.format_s(elapsed)}]")
            raise
        else:
            elapsed = time.perf_counter() - start
            self._emit(self.theme.success, f"DONE [{self.format_s(elapsed)}]")
