""" denoise_pretrain.neural.mlp

    PURPOSE:
        - fully connected stacks: n_hidden activated layers, then a linear output

    BEHAVIOR:
        - weights are fan-in scaled Gaussians N(0, 1/fan_in), biases zero
        - the output layer carries no activation and no norm

    PUBLIC:
        - Activation
        - init_linear(store, prefix, index, fan_in, fan_out, rng)
        - init_mlp(store, prefix, in_width, hidden, n_hidden, out_width, rng)
        - apply_mlp(params, prefix, x, n_hidden, activation) -> Tensor
"""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from denoise_pretrain.neural import layout
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.tensor import Tensor
from denoise_pretrain.tensor import ops

Activation = Callable[[Tensor], Tensor]


def fan_in_gaussian(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    return rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out))


def init_linear(
    store: ParamStore,
    prefix: str,
    index: int,
    fan_in: int,
    fan_out: int,
    rng: np.random.Generator,
) -> None:
    w, b = layout.linear(prefix, index)
    store.add(w, fan_in_gaussian(rng, fan_in, fan_out), "fan_in_gaussian")
    store.add(b, np.zeros(fan_out), "zeros")


def init_norm(store: ParamStore, prefix: str, width: int, part: str = "norm") -> None:
    gain, bias = layout.norm(prefix, part)
    store.add(gain, np.ones(width), "ones")
    store.add(bias, np.zeros(width), "zeros")


def init_mlp(
    store: ParamStore,
    prefix: str,
    in_width: int,
    hidden: int,
    n_hidden: int,
    out_width: int,
    rng: np.random.Generator,
) -> None:
    widths = [in_width] + [hidden] * n_hidden + [out_width]
    for index, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        init_linear(store, prefix, index, fan_in, fan_out, rng)


def apply_linear(params: Mapping[str, Tensor], prefix: str, index: int, x: Tensor) -> Tensor:
    w, b = layout.linear(prefix, index)
    return ops.linear(x, params[w], params[b])


def apply_norm(params: Mapping[str, Tensor], prefix: str, x: Tensor, part: str = "norm") -> Tensor:
    gain, bias = layout.norm(prefix, part)
    return ops.layer_norm(x, params[gain], params[bias])


def apply_mlp(
    params: Mapping[str, Tensor],
    prefix: str,
    x: Tensor,
    n_hidden: int,
    activation: Activation,
    trace: list[np.ndarray] | None = None,
) -> Tensor:
    """ trace, when given, receives the output of every linear layer """
    h = x
    for index in range(n_hidden):
        pre = apply_linear(params, prefix, index, h)
        if trace is not None:
            trace.append(pre.data)
        h = activation(pre)
    out = apply_linear(params, prefix, n_hidden, h)
    if trace is not None:
        trace.append(out.data)
    return out
