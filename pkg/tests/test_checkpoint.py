from __future__ import annotations

import numpy as np
import pytest

from denoise_pretrain.adapters.io.checkpoint import Checkpoint, load_checkpoint, restore_into, save_checkpoint
from denoise_pretrain.errors import CheckpointError
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.gns import GraphNetSimulator


def _checkpoint(rng: np.random.Generator) -> Checkpoint:
    params = {"encoder/embedding": rng.normal(size=(118, 4)), "decoder/noise/linear_0/b": rng.normal(size=3)}
    return Checkpoint(
        params=params,
        ema={n: a * 0.5 for n, a in params.items()},
        step=17,
        config_json='{"seed": 3}',
        config_fingerprint="abc123",
        adam_m={n: np.zeros_like(a) for n, a in params.items()},
        adam_v={n: np.full_like(a, 1e-300) for n, a in params.items()},
        state={"cursor": {"epoch": 1, "position": 4}, "adam_step": 17},
    )


def test_checkpoint_round_trips_bit_exactly(tmp_path, rng):
    ckpt = _checkpoint(rng)
    path = save_checkpoint(tmp_path / "run" / "step_17.safetensors", ckpt)
    again = load_checkpoint(path)
    assert again.same_as(ckpt)
    assert again.state["cursor"] == {"epoch": 1, "position": 4}


def test_same_as_sees_one_bit_changes():
    a = _checkpoint(np.random.default_rng(0))
    b = _checkpoint(np.random.default_rng(0))
    assert a.same_as(b)
    b.ema["encoder/embedding"][0, 0] = np.nextafter(b.ema["encoder/embedding"][0, 0], np.inf)
    assert not a.same_as(b)


def test_missing_checkpoint_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / "nope.safetensors")


def test_garbage_file_raises_checkpoint_error(tmp_path):
    path = tmp_path / "bad.safetensors"
    path.write_bytes(b"\x00\x01 not a checkpoint")
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_restore_needs_every_backbone_tensor(gns_config, rng):
    model = GraphNetSimulator(gns_config)
    store = model.init_params(rng)
    arrays = store.as_dict()
    del arrays[layout.EMBEDDING]
    with pytest.raises(CheckpointError, match="missing"):
        restore_into(model.init_params(rng), arrays)


def test_restore_keeps_fresh_heads_when_allowed(gns_config, rng):
    model = GraphNetSimulator(gns_config)
    source = model.init_params(np.random.default_rng(1))
    arrays = {n: a for n, a in source.as_dict().items() if not n.startswith(layout.GRAPH_READOUT_HEAD)}
    target = model.init_params(np.random.default_rng(2))
    with pytest.raises(CheckpointError):
        restore_into(target.copy(), arrays)
    fresh = restore_into(target, arrays, allow_head_reinit=True)
    assert fresh and all(n.startswith(layout.GRAPH_READOUT_HEAD) for n in fresh)
    assert target.equal(source, prefix=layout.PROCESSOR)
