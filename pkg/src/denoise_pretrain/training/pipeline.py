""" denoise_pretrain.training.pipeline

    PURPOSE:
        - pretrain / finetune / finetune_frozen_backbone training runs

    BEHAVIOR:
        - pretrain: upstream structures only, labels ignored; loss is the
          denoising term plus the masked atom-type term
        - finetune: downstream split into train/valid/test; the backbone and
          the vertex heads come from a checkpoint's EMA weights, the graph
          heads start fresh; loss is the Noisy Nodes sum (target MSE on
          standardized labels plus weighted denoising)
        - finetune_frozen_backbone: same, but only decoder/* parameters are
          updated; backbone gradients are computed and discarded
        - each step: dynamic batch -> tape forward over every block
          iteration -> mean of the per-block losses -> Adam -> EMA
        - one metrics row per step; validation MAE (EMA weights, label
          units) every eval_every steps with early stopping on it
        - checkpoints carry the data cursor, Adam moments and early-stopping
          state, so a resumed run repeats the uninterrupted one exactly

    PUBLIC:
        - METRIC_COLUMNS
        - RunSpec
        - RunResult
        - EarlyStopping
        - Trainer
        - run(mode, dataset, spec, ...) -> RunResult
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from denoise_pretrain.adapters.io.checkpoint import Checkpoint, restore_into, save_checkpoint
from denoise_pretrain.adapters.io.csv_rows import CsvAppender
from denoise_pretrain.bridges.specs.data import DataSpec
from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.bridges.specs.objective import LossWeights
from denoise_pretrain.bridges.specs.training import MODES, TrainConfig
from denoise_pretrain.domain.config import Config
from denoise_pretrain.domain.structure import Dataset, LabelStats, label_statistics, split_dataset
from denoise_pretrain.errors import CheckpointError, ConfigError, ContractViolation
from denoise_pretrain.filesystem.runtree import RunTree
from denoise_pretrain.graph.batch import batch_graphs
from denoise_pretrain.graph.featurize import FeaturizerSpec
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.gns import GraphNetSimulator
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.objectives.losses import mean_of, noisy_nodes_loss
from denoise_pretrain.tensor import Tape, grad
from denoise_pretrain.training.batching import dynamic_batch
from denoise_pretrain.training.evaluate import mean_absolute_error
from denoise_pretrain.training.optim import AdamState, adam_step, ema_update, lr_at
from denoise_pretrain.training.prepare import Cursor, Example, PrepSpec, example_stream

LOGGER = logging.getLogger(__name__)

METRIC_COLUMNS = ("step", "lr", "loss_total", "loss_pos", "loss_type", "loss_target", "val_mae")
INIT_STREAM = 2


@dataclass(frozen=True)
class RunSpec:
    """ the typed views of one Config that a training run reads """

    config: Config
    model: GNSConfig
    train: TrainConfig
    featurizer: FeaturizerSpec
    data: DataSpec

    @classmethod
    def from_config(cls, config: Config) -> "RunSpec":
        return cls(
            config=config,
            model=GNSConfig.from_config(config),
            train=TrainConfig.from_config(config),
            featurizer=FeaturizerSpec.from_config(config),
            data=DataSpec.from_config(config),
        )

    @classmethod
    def from_overrides(cls, **overrides: Any) -> "RunSpec":
        return cls.from_config(Config.load(overrides=overrides))


@dataclass
class EarlyStopping:
    patience: int
    best: float = math.inf
    best_step: int = -1
    bad_evals: int = 0

    def update(self, value: float, step: int) -> bool:
        """ True when value is a new best """
        if value < self.best:
            self.best, self.best_step, self.bad_evals = value, step, 0
            return True
        self.bad_evals += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.bad_evals >= self.patience

    def to_record(self) -> dict[str, float | int | None]:
        return {
            "best": None if math.isinf(self.best) else self.best,
            "best_step": self.best_step,
            "bad_evals": self.bad_evals,
        }

    @classmethod
    def from_record(cls, patience: int, record: dict[str, Any]) -> "EarlyStopping":
        best = record.get("best")
        return cls(
            patience=patience,
            best=math.inf if best is None else float(best),
            best_step=int(record.get("best_step", -1)),
            bad_evals=int(record.get("bad_evals", 0)),
        )


@dataclass
class StepLoss:
    total: float
    position: float
    atom_type: float
    target: float


@dataclass
class RunResult:
    mode: str
    params: ParamStore
    ema: ParamStore
    best: ParamStore
    metrics: list[dict[str, Any]]
    checkpoint: Checkpoint
    checkpoint_path: Path | None
    stats: LabelStats | None
    steps_done: int
    stopped_early: bool = False
    valid_mae: float | None = None
    test_mae: float | None = None
    splits: dict[str, Dataset] = field(default_factory=dict)


@dataclass
class _State:
    params: dict[str, np.ndarray]
    ema: dict[str, np.ndarray]
    best: dict[str, np.ndarray]
    adam: AdamState
    step: int
    cursor: Cursor
    stopper: EarlyStopping
    stats: LabelStats | None


class Trainer:
    def __init__(self, spec: RunSpec, mode: str | None = None) -> None:
        chosen = (mode or spec.train.mode).lower()
        if chosen not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {chosen!r}")
        self.spec = spec
        self.train = spec.train.with_mode(chosen)
        if spec.featurizer.n_basis != spec.model.n_basis:
            raise ConfigError("distance_basis_size differs between featurizer and model")
        self.model = GraphNetSimulator(spec.model)
        self.weights = self._weights(self.train.weights)
        self.dtype = np.dtype(self.train.dtype)

    @property
    def mode(self) -> str:
        return self.train.mode

    def _weights(self, w: LossWeights) -> LossWeights:
        if self.mode == "pretrain":
            w = replace(w, target_coeff=0.0)
            if w.position_coeff <= 0 and w.atom_type_coeff <= 0:
                raise ConfigError("pretraining needs position_loss_coefficient or atom_type_loss_coefficient > 0")
            return w
        if w.target_coeff <= 0:
            raise ConfigError("fine-tuning needs target_loss_coefficient > 0")
        return w

    # parameters

    def init_store(self, init: Checkpoint | None = None, from_scratch: bool = False) -> ParamStore:
        rng = np.random.default_rng(np.random.SeedSequence([self.train.seed, INIT_STREAM]))
        store = self.model.init_params(rng)
        if self.mode == "pretrain":
            return store
        if init is None and not from_scratch:
            raise ContractViolation(f"{self.mode} needs a pre-trained checkpoint (or from_scratch)")
        if init is not None:
            source = init.ema or init.params
            fresh = restore_into(store, source, allow_head_reinit=True)
            LOGGER.info("backbone restored from step %d; %d head tensors left fresh", init.step, len(fresh))
        self.model.reinit_graph_heads(store, rng)
        return store

    def trainable(self, store: ParamStore) -> list[str]:
        if self.train.frozen_backbone:
            return [name for name in store if not layout.is_backbone(name)]
        return list(store)

    # one step

    def loss_and_grads(
        self, store: ParamStore, examples: Sequence[Example]
    ) -> tuple[StepLoss, dict[str, np.ndarray]]:
        batch = batch_graphs([e.graph for e in examples])
        mask = np.concatenate([e.mask for e in examples])
        target = np.concatenate([e.target for e in examples]).astype(self.dtype)
        labels = None
        if self.weights.target_coeff > 0:
            labels = np.array([e.label for e in examples], dtype=self.dtype)

        tape = Tape(self.dtype)
        leaves = store.attach(tape)
        predictions = self.model.forward(batch, leaves, mask)
        terms = [
            noisy_nodes_loss(
                p.graph,
                labels,
                p.noise,
                target,
                p.type_logits,
                (batch.atomic_numbers, mask),
                self.weights,
                batch.graph_id,
                batch.n_graphs,
            )
            for p in predictions
        ]
        total = mean_of([t.total for t in terms])
        names = list(store)
        grads = grad(total, [leaves[n] for n in names])
        loss = StepLoss(
            total=total.item(),
            position=float(np.mean([t.position for t in terms])),
            atom_type=float(np.mean([t.atom_type for t in terms])),
            target=float(np.mean([t.target for t in terms])),
        )
        return loss, {n: g.numpy() for n, g in zip(names, grads)}

    # checkpoints

    def checkpoint(self, state: _State, schemes: dict[str, str]) -> Checkpoint:
        stats = None if state.stats is None else {"mean": state.stats.mean, "std": state.stats.std}
        return Checkpoint(
            params={n: np.array(a, copy=True) for n, a in state.params.items()},
            ema={n: np.array(a, copy=True) for n, a in state.ema.items()},
            best={n: np.array(a, copy=True) for n, a in state.best.items()},
            adam_m={n: np.array(a, copy=True) for n, a in state.adam.m.items()},
            adam_v={n: np.array(a, copy=True) for n, a in state.adam.v.items()},
            step=state.step,
            config_json=self.spec.config.to_json(),
            config_fingerprint=self.spec.config.fingerprint(),
            state={
                "mode": self.mode,
                "cursor": state.cursor.to_record(),
                "adam_step": state.adam.step,
                "early_stopping": state.stopper.to_record(),
                "stats": stats,
                "schemes": schemes,
                "variant": self.spec.model.variant,
            },
        )

    def _resume_state(self, store: ParamStore, ckpt: Checkpoint) -> _State:
        saved_mode = ckpt.state.get("mode")
        if saved_mode != self.mode:
            raise CheckpointError(f"checkpoint was written by a {saved_mode} run, not {self.mode}")
        if ckpt.config_fingerprint != self.spec.config.fingerprint():
            LOGGER.warning("resuming with a config that differs from the checkpoint's")
        live, shadow = store.copy(), store.copy()
        restore_into(live, ckpt.params)
        restore_into(shadow, ckpt.ema)
        stats = ckpt.state.get("stats")
        cursor = ckpt.state.get("cursor") or {}
        return _State(
            params=live.as_dict(),
            ema=shadow.as_dict(),
            best={n: np.array(a, copy=True) for n, a in ckpt.best.items()},
            adam=AdamState(step=int(ckpt.state.get("adam_step", 0)), m=dict(ckpt.adam_m), v=dict(ckpt.adam_v)),
            step=ckpt.step,
            cursor=Cursor(int(cursor.get("epoch", 0)), int(cursor.get("position", 0))),
            stopper=EarlyStopping.from_record(self.train.early_stopping_patience, ckpt.state.get("early_stopping", {})),
            stats=None if stats is None else LabelStats(float(stats["mean"]), float(stats["std"])),
        )

    # data

    def _splits(self, dataset: Dataset) -> dict[str, Dataset]:
        if self.mode == "pretrain":
            upstream = dataset.head(self.spec.data.upstream_fraction)
            return {"train": upstream}
        split = split_dataset(len(dataset), self.spec.data.fractions, self.train.seed)
        train, valid, test = split.apply(dataset)
        if len(train) == 0:
            raise ContractViolation(f"no training structures in {dataset.name!r} after splitting")
        return {"train": train, "valid": valid, "test": test}

    def _prep(self, stats: LabelStats | None) -> PrepSpec:
        label = self.spec.data.target_label if self.weights.target_coeff > 0 else None
        return PrepSpec(
            featurizer=self.spec.featurizer,
            max_edges_per_vertex=self.train.max_edges_per_vertex,
            noise=self.train.noise,
            mask_prob=self.weights.atom_mask_prob if self.weights.atom_type_coeff > 0 else 0.0,
            label=label,
            stats=stats,
            seed=self.train.seed,
        )

    def _mae(self, arrays: dict[str, np.ndarray], schemes: dict[str, str], dataset: Dataset, stats: LabelStats | None) -> float:
        return mean_absolute_error(
            self.model,
            ParamStore.from_arrays(arrays, schemes),
            dataset,
            self.spec.data.target_label,
            self.spec.featurizer,
            self.train.caps,
            self.train.max_edges_per_vertex,
            stats,
        )

    # the loop

    def run(
        self,
        dataset: Dataset,
        *,
        init: Checkpoint | None = None,
        resume: Checkpoint | None = None,
        tree: RunTree | None = None,
        from_scratch: bool = False,
    ) -> RunResult:
        cfg = self.train
        splits = self._splits(dataset)
        train_set = splits["train"]
        uses_labels = self.weights.target_coeff > 0

        store = self.init_store(init if resume is None else None, from_scratch or resume is not None)
        schemes = dict(store.schemes)
        trainable = self.trainable(store)
        if resume is not None:
            state = self._resume_state(store, resume)
        else:
            stats = label_statistics(train_set, self.spec.data.target_label) if uses_labels else None
            state = _State(
                params=store.as_dict(),
                ema=store.as_dict(),
                best={},
                adam=AdamState.zeros_like(store.as_dict()),
                step=0,
                cursor=Cursor(),
                stopper=EarlyStopping(cfg.early_stopping_patience),
                stats=stats,
            )
        valid = splits.get("valid")
        evaluate = uses_labels and valid is not None and len(valid) > 0

        LOGGER.info(
            "%s: %d structures, %d parameters (%d trainable), steps %d..%d",
            self.mode,
            len(train_set),
            store.size(),
            sum(store.view(n).size for n in trainable),
            state.step,
            cfg.steps,
        )

        metrics: list[dict[str, Any]] = []
        stopped = False
        metrics_file = None
        if tree is not None:
            metrics_file = CsvAppender(tree.metrics_path(f"{self.mode}.csv"), METRIC_COLUMNS)
        stream = example_stream(train_set, self._prep(state.stats), state.cursor, cfg.threads)
        batches = dynamic_batch(stream, cfg.caps)
        try:
            while state.step < cfg.steps and not stopped:
                step = state.step
                group = next(batches)
                loss, grads = self.loss_and_grads(ParamStore.from_arrays(state.params, schemes), group)
                if cfg.frozen_backbone:
                    grads = {n: grads[n] for n in trainable}
                lr = lr_at(step, cfg)
                state.params, state.adam = adam_step(
                    state.params, grads, state.adam, lr, cfg.beta1, cfg.beta2, cfg.adam_epsilon
                )
                state.ema = ema_update(state.ema, state.params, cfg.ema_decay, trainable)
                state.cursor = group[-1].after
                state.step = step + 1

                row: dict[str, Any] = {
                    "step": step,
                    "lr": lr,
                    "loss_total": loss.total,
                    "loss_pos": loss.position,
                    "loss_type": loss.atom_type,
                    "loss_target": loss.target,
                    "val_mae": None,
                }
                if evaluate and (state.step % cfg.eval_every == 0 or state.step == cfg.steps):
                    mae = self._mae(state.ema, schemes, valid, state.stats)
                    row["val_mae"] = mae
                    if state.stopper.update(mae, state.step):
                        state.best = {n: np.array(a, copy=True) for n, a in state.ema.items()}
                    stopped = state.stopper.should_stop
                metrics.append(row)
                if metrics_file is not None:
                    metrics_file.append(row)
                if state.step % cfg.log_every == 0 or state.step == cfg.steps:
                    LOGGER.info("step %d lr %.3e loss %.6f", step, lr, loss.total)
                if tree is not None and cfg.checkpoint_every and state.step % cfg.checkpoint_every == 0:
                    save_checkpoint(tree.checkpoint_path(state.step), self.checkpoint(state, schemes))
        finally:
            batches.close()
            stream.close()
            if metrics_file is not None:
                metrics_file.close()

        if stopped:
            LOGGER.info("early stopping at step %d (best %.6g at step %d)", state.step, state.stopper.best, state.stopper.best_step)
        final = self.checkpoint(state, schemes)
        path = save_checkpoint(tree.final_checkpoint_path(), final) if tree is not None else None
        best_arrays = state.best or state.ema
        result = RunResult(
            mode=self.mode,
            params=ParamStore.from_arrays(state.params, schemes),
            ema=ParamStore.from_arrays(state.ema, schemes),
            best=ParamStore.from_arrays(best_arrays, schemes),
            metrics=metrics,
            checkpoint=final,
            checkpoint_path=path,
            stats=state.stats,
            steps_done=state.step,
            stopped_early=stopped,
            splits=splits,
        )
        if evaluate:
            result.valid_mae = None if math.isinf(state.stopper.best) else state.stopper.best
        test = splits.get("test")
        if uses_labels and test is not None and len(test) > 0:
            result.test_mae = self._mae(best_arrays, schemes, test, state.stats)
            LOGGER.info("test MAE %.6g", result.test_mae)
        return result


def run(
    mode: str,
    dataset: Dataset,
    spec: RunSpec,
    *,
    init: Checkpoint | None = None,
    resume: Checkpoint | None = None,
    tree: RunTree | None = None,
    from_scratch: bool = False,
) -> RunResult:
    return Trainer(spec, mode).run(dataset, init=init, resume=resume, tree=tree, from_scratch=from_scratch)
