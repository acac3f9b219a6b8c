"""
denoise_pretrain.adapters.io.xyz

Extended-XYZ reader / writer.

    frame:
        <atom count>
        <comment; key=value pairs with numeric values become labels>
        <Element x y z [rx ry rz]>  x count

A frame whose comment declares pair_positions=T carries the relaxed frame
(pair_positions) in columns 5-7 of every atom row. Without the marker any
extra columns (forces, velocities) are ignored. The writer emits the marker
and all seven columns for frames with pair_positions.

Coordinates and labels are written with 17 significant digits, which is
enough for float64 values to survive a write -> parse cycle unchanged.

"""

from __future__ import annotations

import logging
import shlex
from pathlib import Path
from typing import Iterable

import numpy as np

from denoise_pretrain.domain.elements import atomic_number, symbol_of
from denoise_pretrain.domain.structure import Dataset, Structure
from denoise_pretrain.errors import ContractViolation, ParseError

LOGGER = logging.getLogger(__name__)

PAIR_MARKER = "pair_positions"
TRUE_FLAGS = frozenset({"t", "true", "1"})


def _comment_tokens(comment: str) -> list[str]:
    try:
        return shlex.split(comment)
    except ValueError:
        return comment.split()


def parse_comment(comment: str) -> dict[str, float]:
    """ numeric key=value pairs of an extended-XYZ comment line """
    labels: dict[str, float] = {}
    for token in _comment_tokens(comment):
        if "=" not in token:
            continue
        key, value = token.split("=", 1)
        if key.strip() == PAIR_MARKER:
            continue
        try:
            labels[key.strip()] = float(value)
        except ValueError:
            continue
    return labels


def declares_pairs(comment: str) -> bool:
    for token in _comment_tokens(comment):
        key, _, value = token.partition("=")
        if key.strip() == PAIR_MARKER:
            return value.strip().lower() in TRUE_FLAGS
    return False


def _pair_row(fields: list[str], row: str, line_number: int) -> list[float]:
    if len(fields) < 7:
        raise ParseError(f"frame declares {PAIR_MARKER} but row {row!r} has no relaxed columns", line_number)
    try:
        return [float(v) for v in fields[4:7]]
    except ValueError:
        raise ParseError(f"non-numeric relaxed coordinate in {row!r}", line_number) from None


def parse_xyz(text: str) -> list[Structure]:
    lines = text.splitlines()
    structures: list[Structure] = []
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        count_line = i + 1
        try:
            count = int(lines[i].strip())
        except ValueError:
            raise ParseError(f"expected an atom count, found {lines[i].strip()!r}", count_line) from None
        if count < 1:
            raise ParseError(f"atom count must be >= 1, found {count}", count_line)
        if i + 1 >= len(lines):
            raise ParseError("missing comment line", count_line + 1)
        labels = parse_comment(lines[i + 1])
        with_pairs = declares_pairs(lines[i + 1])

        rows = lines[i + 2 : i + 2 + count]
        if len(rows) < count:
            raise ParseError(
                f"count mismatch: expected {count} atom rows, found {len(rows)}",
                i + 3 + len(rows),
            )
        numbers = np.empty(count, dtype=np.int64)
        positions = np.empty((count, 3), dtype=np.float64)
        pair = np.empty((count, 3), dtype=np.float64) if with_pairs else None
        for k, row in enumerate(rows):
            line_number = i + 3 + k
            fields = row.split()
            if len(fields) < 4:
                raise ParseError(f"malformed atom row {row!r}", line_number)
            try:
                numbers[k] = atomic_number(fields[0])
            except ContractViolation as exc:
                raise ParseError(str(exc), line_number) from None
            try:
                positions[k] = [float(v) for v in fields[1:4]]
            except ValueError:
                raise ParseError(f"non-numeric coordinate in {row!r}", line_number) from None
            if pair is not None:
                pair[k] = _pair_row(fields, row, line_number)
        try:
            structures.append(Structure(numbers, positions, labels, pair))
        except ContractViolation as exc:
            raise ParseError(str(exc), count_line) from None
        i += 2 + count

    return structures


def format_frame(structure: Structure) -> str:
    tokens = [f"{key}={value:.17g}" for key, value in structure.labels.items()]
    if structure.pair_positions is not None:
        tokens.insert(0, f"{PAIR_MARKER}=T")
    comment = " ".join(tokens)
    rows = [
        f"{symbol_of(int(z))} {x:.17g} {y:.17g} {w:.17g}"
        for z, (x, y, w) in zip(structure.atomic_numbers, structure.positions)
    ]
    if structure.pair_positions is not None:
        rows = [
            f"{row} {rx:.17g} {ry:.17g} {rz:.17g}"
            for row, (rx, ry, rz) in zip(rows, structure.pair_positions)
        ]
    return "\n".join([str(structure.n_atoms), comment, *rows])


def write_xyz(structures: Iterable[Structure]) -> str:
    frames = [format_frame(s) for s in structures]
    return "\n".join(frames) + ("\n" if frames else "")


def read_xyz_file(path: str | Path, name: str | None = None) -> Dataset:
    src = Path(path).expanduser()
    if not src.exists():
        raise FileNotFoundError(f"xyz file not found: {src}")
    structures = parse_xyz(src.read_text(encoding="utf-8"))
    LOGGER.info("read %d structures from %s", len(structures), src)
    return Dataset(tuple(structures), name or src.stem)


def write_xyz_file(path: str | Path, structures: Iterable[Structure]) -> Path:
    out = Path(path).expanduser().resolve()
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(write_xyz(structures), encoding="utf-8", newline="\n")
    return out
