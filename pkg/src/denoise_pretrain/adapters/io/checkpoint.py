"""
denoise_pretrain.adapters.io.checkpoint

Checkpoint container on top of safetensors.

    tensors:
        params/<name>   live parameters
        ema/<name>      EMA shadow (evaluation weights)
        best/<name>     EMA shadow at the best validation MAE (fine-tuning only)
        adam_m/<name>   Adam first moments
        adam_v/<name>   Adam second moments

    header metadata (all strings):
        format_version, config (JSON), config_fingerprint, step, state (JSON:
        rng cursor, adam step, early-stopping state, target statistics,
        init schemes, mode)

safetensors stores little-endian raw payloads behind a JSON manifest of
name, dtype, shape and byte offsets, so float64 values come back bit-exact.

"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from safetensors import SafetensorError, safe_open
from safetensors.numpy import load_file, save_file

from denoise_pretrain.errors import CheckpointError
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.params import ParamStore

LOGGER = logging.getLogger(__name__)

FORMAT_VERSION = 1
GROUPS = ("params", "ema", "best", "adam_m", "adam_v")


@dataclass
class Checkpoint:
    params: dict[str, np.ndarray]
    ema: dict[str, np.ndarray]
    step: int
    config_json: str
    config_fingerprint: str
    best: dict[str, np.ndarray] = field(default_factory=dict)
    adam_m: dict[str, np.ndarray] = field(default_factory=dict)
    adam_v: dict[str, np.ndarray] = field(default_factory=dict)
    state: dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def same_as(self, other: "Checkpoint") -> bool:
        """ bit-exact comparison of every tensor and header field """
        if (self.step, self.config_json, self.config_fingerprint, self.format_version) != (
            other.step,
            other.config_json,
            other.config_fingerprint,
            other.format_version,
        ):
            return False
        if json.dumps(self.state, sort_keys=True) != json.dumps(other.state, sort_keys=True):
            return False
        for group in GROUPS:
            mine, theirs = getattr(self, group), getattr(other, group)
            if mine.keys() != theirs.keys():
                return False
            for name in mine:
                a, b = mine[name], theirs[name]
                if a.dtype != b.dtype or a.shape != b.shape or a.tobytes() != b.tobytes():
                    return False
        return True


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> Path:
    out = Path(path).expanduser().resolve()
    out.parent.mkdir(parents=True, exist_ok=True)
    tensors: dict[str, np.ndarray] = {}
    for group in GROUPS:
        for name, arr in getattr(checkpoint, group).items():
            tensors[f"{group}/{name}"] = np.ascontiguousarray(arr)
    metadata = {
        "format_version": str(checkpoint.format_version),
        "config": checkpoint.config_json,
        "config_fingerprint": checkpoint.config_fingerprint,
        "step": str(checkpoint.step),
        "state": json.dumps(checkpoint.state, sort_keys=True),
    }
    tmp = out.with_suffix(out.suffix + ".tmp")
    save_file(tensors, str(tmp), metadata=metadata)
    tmp.replace(out)
    LOGGER.debug("checkpoint step %d -> %s", checkpoint.step, out)
    return out


def load_checkpoint(path: str | Path) -> Checkpoint:
    src = Path(path).expanduser().resolve()
    if not src.exists():
        raise FileNotFoundError(f"checkpoint not found: {src}")
    try:
        with safe_open(str(src), framework="numpy") as handle:
            metadata = handle.metadata() or {}
        tensors = load_file(str(src))
    except (SafetensorError, OSError, ValueError) as exc:
        raise CheckpointError(f"{src}: unreadable checkpoint ({exc})") from None

    version = int(metadata.get("format_version", -1))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{src}: format version {version}, expected {FORMAT_VERSION}")
    groups: dict[str, dict[str, np.ndarray]] = {g: {} for g in GROUPS}
    for key, arr in tensors.items():
        group, _, name = key.partition("/")
        if group not in groups or not name:
            raise CheckpointError(f"{src}: unexpected tensor {key!r}")
        groups[group][name] = arr
    try:
        state = json.loads(metadata.get("state", "{}"))
        step = int(metadata["step"])
        config_json = metadata["config"]
        fingerprint = metadata["config_fingerprint"]
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"{src}: incomplete header ({exc})") from None
    return Checkpoint(
        params=groups["params"],
        ema=groups["ema"],
        best=groups["best"],
        adam_m=groups["adam_m"],
        adam_v=groups["adam_v"],
        step=step,
        config_json=config_json,
        config_fingerprint=fingerprint,
        state=state,
        format_version=version,
    )


def restore_into(
    store: ParamStore,
    arrays: Mapping[str, np.ndarray],
    *,
    allow_head_reinit: bool = False,
) -> list[str]:
    """
    copy matching tensors into store; returns names left at their fresh init.

    backbone tensors must all be present with identical shapes. decoder
    tensors that are missing or shaped differently are kept fresh only when
    allow_head_reinit is set.
    """
    fresh: list[str] = []
    for name, current in store.items():
        loaded = arrays.get(name)
        head = not layout.is_backbone(name)
        if loaded is None:
            if head and allow_head_reinit:
                fresh.append(name)
                continue
            raise CheckpointError(f"checkpoint is missing parameter {name!r}")
        if loaded.shape != current.shape:
            if head and allow_head_reinit:
                fresh.append(name)
                continue
            raise CheckpointError(f"parameter {name!r}: checkpoint shape {loaded.shape} != model shape {current.shape}")
        store.set(name, loaded)
    extra = sorted(set(arrays) - set(store))
    if extra and not allow_head_reinit:
        raise CheckpointError(f"checkpoint holds parameters the model does not: {extra[:5]}")
    return fresh
