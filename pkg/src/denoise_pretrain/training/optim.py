""" denoise_pretrain.training.optim

    PURPOSE:
        - learning-rate schedule, Adam and the EMA shadow

    BEHAVIOR:
        - lr_at: linear warm up from warmup_start_lr to warmup_max_lr, then a
          single cosine half-cycle down to cosine_min_lr, flat afterwards
        - adam_step: bias-corrected Adam over a name -> array mapping; only
          names present in grads move; any non-finite gradient aborts the
          whole step before anything is written
        - ema_update: shadow <- decay * shadow + (1 - decay) * params

    PUBLIC:
        - lr_at(step, config) -> float
        - AdamState
        - adam_step(params, grads, state, lr, beta1, beta2, eps) -> (params, state)
        - ema_update(shadow, params, decay, names=None) -> shadow
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from denoise_pretrain.bridges.specs.training import TrainConfig
from denoise_pretrain.errors import ContractViolation, NonFiniteGradientError

Arrays = Mapping[str, np.ndarray]


def lr_at(step: int, config: TrainConfig) -> float:
    if step < 0:
        raise ContractViolation(f"step must be >= 0, got {step}")
    start, peak, floor = config.warmup_start_lr, config.warmup_max_lr, config.cosine_min_lr
    if step < config.warmup_steps:
        return start + (peak - start) * step / config.warmup_steps
    into = step - config.warmup_steps
    if config.cosine_cycle_length == 0 or into >= config.cosine_cycle_length:
        return floor
    t = into / config.cosine_cycle_length
    return peak - (peak - floor) * (1.0 - math.cos(math.pi * t)) / 2.0


@dataclass
class AdamState:
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: Arrays) -> "AdamState":
        return cls(
            step=0,
            m={n: np.zeros_like(a, dtype=np.float64) for n, a in params.items()},
            v={n: np.zeros_like(a, dtype=np.float64) for n, a in params.items()},
        )

    def copy(self) -> "AdamState":
        return AdamState(
            step=self.step,
            m={n: a.copy() for n, a in self.m.items()},
            v={n: a.copy() for n, a in self.v.items()},
        )


def adam_step(
    params: Arrays,
    grads: Arrays,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.95,
    eps: float = 1e-8,
) -> tuple[dict[str, np.ndarray], AdamState]:
    for name, g in grads.items():
        if name not in params:
            raise ContractViolation(f"gradient for unknown parameter {name!r}")
        if np.shape(g) != np.shape(params[name]):
            raise ContractViolation(f"{name}: gradient shape {np.shape(g)} != {np.shape(params[name])}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(name)

    t = state.step + 1
    new_params = {n: np.array(a, copy=True) for n, a in params.items()}
    new_state = AdamState(step=t, m=dict(state.m), v=dict(state.v))
    correct1 = 1.0 - beta1**t
    correct2 = 1.0 - beta2**t
    for name, g in grads.items():
        m = state.m.get(name, np.zeros_like(g))
        v = state.v.get(name, np.zeros_like(g))
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        new_state.m[name] = m
        new_state.v[name] = v
        old = new_params[name]
        new_params[name] = (old - lr * (m / correct1) / (np.sqrt(v / correct2) + eps)).astype(old.dtype, copy=False)
    return new_params, new_state


def ema_update(
    shadow: Arrays,
    params: Arrays,
    decay: float = 0.9999,
    names: Iterable[str] | None = None,
) -> dict[str, np.ndarray]:
    """ names limits which entries move; the rest are copied unchanged """
    if set(shadow) != set(params):
        raise ContractViolation("EMA shadow and parameters hold different names")
    moving = set(shadow) if names is None else set(names)
    out: dict[str, np.ndarray] = {}
    for n, value in shadow.items():
        current = np.asarray(value)
        if n in moving:
            out[n] = (decay * current + (1.0 - decay) * np.asarray(params[n])).astype(current.dtype, copy=False)
        else:
            out[n] = np.array(current, copy=True)
    return out
