"""
denoise_pretrain.adapters.io.csv_rows

CSV row writers for metrics logs, diagnostics profiles and dataset summaries.

Floats are written with repr() so a metrics file read back gives the exact
values the run produced; two identical runs give byte-identical files.

"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO

import numpy as np


def safe_jsonable(value: Any) -> Any:
    """ numpy scalars/arrays, Paths and tuples to plain JSON values """
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [safe_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): safe_jsonable(v) for k, v in value.items()}
    return str(value)


def format_cell(value: Any) -> str:
    value = safe_jsonable(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False, sort_keys=True)
    return str(value)


def flatten_for_csv(row: Mapping[str, Any]) -> dict[str, str]:
    return {str(key): format_cell(value) for key, value in row.items()}


def collect_fieldnames(rows: Sequence[Mapping[str, Any]]) -> list[str]:
    """ union of row keys in first-seen order """
    names: dict[str, None] = {}
    for row in rows:
        for key in row:
            names.setdefault(str(key), None)
    return list(names)


def write_rows(
    stream: TextIO,
    rows: Sequence[Mapping[str, Any]],
    fieldnames: Sequence[str] | None = None,
) -> None:
    flat_rows = [flatten_for_csv(row) for row in rows]
    columns = list(fieldnames or collect_fieldnames(flat_rows))
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in flat_rows:
        writer.writerow({key: row.get(key, "") for key in columns})


def rows_to_text(rows: Sequence[Mapping[str, Any]], fieldnames: Sequence[str] | None = None) -> str:
    buffer = io.StringIO()
    write_rows(buffer, rows, fieldnames)
    return buffer.getvalue()


def write_dict_csv(
    path: str | Path,
    rows: Sequence[Mapping[str, Any]],
    *,
    fieldnames: Sequence[str] | None = None,
) -> Path:
    out = Path(path).expanduser().resolve()
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as f:
        write_rows(f, rows, fieldnames)
    return out


def read_dict_csv(path: str | Path) -> list[dict[str, str]]:
    src = Path(path).expanduser().resolve()
    with src.open("r", newline="", encoding="utf-8") as f:
        return [dict(row) for row in csv.DictReader(f)]


class CsvAppender:
    """ header on open, one flushed row per append; used for the metrics log """

    def __init__(self, path: str | Path, fieldnames: Sequence[str]) -> None:
        self.path = Path(path).expanduser().resolve()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.fieldnames = list(fieldnames)
        self._handle = self.path.open("w", newline="", encoding="utf-8")
        self._writer = csv.DictWriter(self._handle, fieldnames=self.fieldnames, lineterminator="\n")
        self._writer.writeheader()

    def append(self, row: Mapping[str, Any]) -> None:
        flat = flatten_for_csv(row)
        self._writer.writerow({key: flat.get(key, "") for key in self.fieldnames})
        self._handle.flush()

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()

    def __enter__(self) -> "CsvAppender":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
