""" denoise_pretrain.tensor.ops

    PURPOSE:
        - the differentiable op set every model and loss is written in

    BEHAVIOR:
        - shapes must match exactly; the only broadcast allowed is between a
          tensor and a 0-d tensor (explicit row broadcasts go through
          broadcast_rows / linear)
        - each op checks its output is finite and registers a local gradient
          rule on the tape of its tracked inputs
        - inputs without a tape yield constant outputs

    PUBLIC:
        - add, sub, mul, matmul, linear, concat, take_slice, gather,
          broadcast_rows, reshape, reduce_sum, reduce_mean, segment_sum,
          segment_mean, layer_norm, shifted_softplus, leaky_relu, affine,
          square, sqrt, exp, log, log_softmax
        - plus / minus / times (python-scalar aware helpers behind operators)
"""

from __future__ import annotations

import math
from typing import Any, Sequence

import numpy as np
from scipy.special import expit
from scipy.special import log_softmax as _log_softmax

from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.tensor.tape import Backward, Tape, Tensor

LAYER_NORM_EPS = 1e-6
_LOG2 = math.log(2.0)


def _tape_of(tensors: Sequence[Tensor]) -> Tape | None:
    for tensor in tensors:
        if tensor.tape is not None:
            return tensor.tape
    return None


def _finish(name: str, inputs: Sequence[Tensor], out: np.ndarray, backward: Backward) -> Tensor:
    out = np.asarray(out)
    if not np.all(np.isfinite(out)):
        raise ContractViolation(f"{name}: non-finite output")
    tape = _tape_of(inputs)
    if tape is None:
        return Tensor(out)
    return tape.record(name, inputs, out, backward)


def _check_pair(name: str, a: Tensor, b: Tensor) -> None:
    if a.shape == b.shape or a.ndim == 0 or b.ndim == 0:
        return
    raise ContractViolation(f"{name}: shape mismatch {a.shape} vs {b.shape}")


def _reduce_to(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    return np.sum(g).reshape(shape)


# elementwise binary


def add(a: Tensor, b: Tensor) -> Tensor:
    _check_pair("add", a, b)
    return _finish(
        "add",
        (a, b),
        a.data + b.data,
        lambda g: (_reduce_to(g, a.shape), _reduce_to(g, b.shape)),
    )


def sub(a: Tensor, b: Tensor) -> Tensor:
    _check_pair("sub", a, b)
    return _finish(
        "sub",
        (a, b),
        a.data - b.data,
        lambda g: (_reduce_to(g, a.shape), _reduce_to(-g, b.shape)),
    )


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_pair("mul", a, b)
    return _finish(
        "mul",
        (a, b),
        a.data * b.data,
        lambda g: (_reduce_to(g * b.data, a.shape), _reduce_to(g * a.data, b.shape)),
    )


def plus(a: Tensor, other: Any) -> Tensor:
    if isinstance(other, Tensor):
        return add(a, other)
    return affine(a, 1.0, float(other))


def minus(a: Tensor, other: Any) -> Tensor:
    if isinstance(other, Tensor):
        return sub(a, other)
    return affine(a, 1.0, -float(other))


def times(a: Tensor, other: Any) -> Tensor:
    if isinstance(other, Tensor):
        return mul(a, other)
    return affine(a, float(other), 0.0)


# linear algebra


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ContractViolation(f"matmul: incompatible shapes {a.shape} @ {b.shape}")
    return _finish(
        "matmul",
        (a, b),
        a.data @ b.data,
        lambda g: (g @ b.data.T, a.data.T @ g),
    )


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """ x @ weight + bias, the bias added to every row """
    if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise ContractViolation(f"linear: incompatible shapes {x.shape} @ {weight.shape}")
    if bias.shape != (weight.shape[1],):
        raise ContractViolation(f"linear: bias shape {bias.shape} != ({weight.shape[1]},)")
    return _finish(
        "linear",
        (x, weight, bias),
        x.data @ weight.data + bias.data,
        lambda g: (g @ weight.data.T, x.data.T @ g, g.sum(axis=0)),
    )


# structural


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ContractViolation("concat: no inputs")
    ndim = tensors[0].ndim
    ax = axis % ndim if ndim else 0
    for t in tensors:
        if t.ndim != ndim:
            raise ContractViolation("concat: rank mismatch")
        for d in range(ndim):
            if d != ax and t.shape[d] != tensors[0].shape[d]:
                raise ContractViolation(
                    f"concat: shape mismatch {tensors[0].shape} vs {t.shape} on axis {d}"
                )
    sizes = [t.shape[ax] for t in tensors]
    cuts = np.cumsum(sizes)[:-1]
    return _finish(
        "concat",
        tensors,
        np.concatenate([t.data for t in tensors], axis=ax),
        lambda g: tuple(np.split(g, cuts, axis=ax)),
    )


def take_slice(x: Tensor, start: int, stop: int, axis: int = -1) -> Tensor:
    ax = axis % x.ndim
    if not 0 <= start <= stop <= x.shape[ax]:
        raise ContractViolation(f"slice [{start}:{stop}] out of range for axis of size {x.shape[ax]}")
    index = [slice(None)] * x.ndim
    index[ax] = slice(start, stop)
    key = tuple(index)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        out = np.zeros(x.shape, dtype=g.dtype)
        out[key] = g
        return (out,)

    return _finish("slice", (x,), x.data[key], backward)


def gather(x: Tensor, index: np.ndarray) -> Tensor:
    """ rows of x selected by an integer index (repeats allowed) """
    idx = np.asarray(index, dtype=np.int64)
    if idx.ndim != 1:
        raise ContractViolation("gather: index must be one-dimensional")
    if idx.size and (idx.min() < 0 or idx.max() >= x.shape[0]):
        raise ContractViolation(f"gather: index out of range [0, {x.shape[0]})")

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        out = np.zeros(x.shape, dtype=g.dtype)
        np.add.at(out, idx, g)
        return (out,)

    return _finish("gather", (x,), x.data[idx], backward)


def broadcast_rows(v: Tensor, n: int) -> Tensor:
    if v.ndim != 1:
        raise ContractViolation(f"broadcast_rows: expected a vector, got {v.shape}")
    return _finish(
        "broadcast_rows",
        (v,),
        np.tile(v.data, (n, 1)),
        lambda g: (g.sum(axis=0),),
    )


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape, dtype=np.int64)) != x.size:
        raise ContractViolation(f"reshape: cannot view {x.shape} as {shape}")
    return _finish("reshape", (x,), x.data.reshape(shape), lambda g: (g.reshape(x.shape),))


# reductions


def reduce_sum(x: Tensor, axis: int | None = None) -> Tensor:
    if axis is None:
        return _finish(
            "sum",
            (x,),
            np.sum(x.data),
            lambda g: (np.broadcast_to(g, x.shape).copy(),),
        )
    ax = axis % x.ndim
    return _finish(
        "sum",
        (x,),
        np.sum(x.data, axis=ax),
        lambda g: (np.broadcast_to(np.expand_dims(g, ax), x.shape).copy(),),
    )


def reduce_mean(x: Tensor, axis: int | None = None) -> Tensor:
    if x.size == 0:
        raise ContractViolation("mean of an empty tensor")
    if axis is None:
        n = x.size
        return _finish(
            "mean",
            (x,),
            np.mean(x.data),
            lambda g: (np.broadcast_to(g / n, x.shape).copy(),),
        )
    ax = axis % x.ndim
    n = x.shape[ax]
    return _finish(
        "mean",
        (x,),
        np.mean(x.data, axis=ax),
        lambda g: (np.broadcast_to(np.expand_dims(g / n, ax), x.shape).copy(),),
    )


def _check_segments(name: str, values: Tensor, ids: np.ndarray, n_segments: int) -> np.ndarray:
    seg = np.asarray(ids, dtype=np.int64)
    if seg.ndim != 1 or values.ndim < 1 or seg.shape[0] != values.shape[0]:
        raise ContractViolation(f"{name}: need one segment id per row, got {seg.shape} for {values.shape}")
    if seg.size and (seg.min() < 0 or seg.max() >= n_segments):
        raise ContractViolation(f"{name}: segment ids must lie in [0, {n_segments})")
    return seg


def segment_sum(values: Tensor, segment_ids: np.ndarray, n_segments: int) -> Tensor:
    seg = _check_segments("segment_sum", values, segment_ids, n_segments)
    out = np.zeros((n_segments, *values.shape[1:]), dtype=values.dtype)
    np.add.at(out, seg, values.data)
    return _finish("segment_sum", (values,), out, lambda g: (g[seg],))


def segment_mean(values: Tensor, segment_ids: np.ndarray, n_segments: int) -> Tensor:
    """ per-segment average; a segment with no members is the zero vector """
    seg = _check_segments("segment_mean", values, segment_ids, n_segments)
    counts = np.bincount(seg, minlength=n_segments).astype(values.dtype)
    denom = np.maximum(counts, 1.0).reshape((n_segments,) + (1,) * (values.ndim - 1))
    out = np.zeros((n_segments, *values.shape[1:]), dtype=values.dtype)
    np.add.at(out, seg, values.data)
    return _finish("segment_mean", (values,), out / denom, lambda g: ((g / denom)[seg],))


# normalization and activations


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    width = x.shape[-1] if x.ndim else 0
    if gain.shape != (width,) or bias.shape != (width,):
        raise ContractViolation(
            f"layer_norm: gain/bias {gain.shape}/{bias.shape} do not match last axis {width}"
        )
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    inv = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv
    lead = tuple(range(x.ndim - 1))

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        gx = g * gain.data
        dx = inv * (
            gx
            - gx.mean(axis=-1, keepdims=True)
            - xhat * (gx * xhat).mean(axis=-1, keepdims=True)
        )
        return dx, (g * xhat).sum(axis=lead), g.sum(axis=lead)

    return _finish("layer_norm", (x, gain, bias), xhat * gain.data + bias.data, backward)


def shifted_softplus(x: Tensor) -> Tensor:
    """ log(0.5 e^x + 0.5) """
    return _finish(
        "shifted_softplus",
        (x,),
        np.logaddexp(x.data, 0.0) - _LOG2,
        lambda g: (g * expit(x.data),),
    )


def leaky_relu(x: Tensor, slope: float) -> Tensor:
    slope = float(slope)
    positive = x.data >= 0
    return _finish(
        "leaky_relu",
        (x,),
        np.where(positive, x.data, slope * x.data),
        lambda g: (np.where(positive, g, slope * g),),
    )


def affine(x: Tensor, scale: float, shift: float) -> Tensor:
    scale = float(scale)
    shift = float(shift)
    return _finish("affine", (x,), scale * x.data + shift, lambda g: (scale * g,))


def square(x: Tensor) -> Tensor:
    return _finish("square", (x,), x.data * x.data, lambda g: (2.0 * x.data * g,))


def sqrt(x: Tensor) -> Tensor:
    if np.any(x.data < 0):
        raise ContractViolation("sqrt of a negative value")
    out = np.sqrt(x.data)

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        if np.any(out == 0):
            raise ContractViolation("sqrt: gradient undefined at zero")
        return (g / (2.0 * out),)

    return _finish("sqrt", (x,), out, backward)


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)
    return _finish("exp", (x,), out, lambda g: (g * out,))


def log(x: Tensor) -> Tensor:
    if np.any(x.data <= 0):
        raise ContractViolation("log of a non-positive value")
    return _finish("log", (x,), np.log(x.data), lambda g: (g / x.data,))


def log_softmax(x: Tensor) -> Tensor:
    """ normalized log-probabilities over the last axis """
    out = _log_softmax(x.data, axis=-1)
    probs = np.exp(out)
    return _finish(
        "log_softmax",
        (x,),
        out,
        lambda g: (g - probs * g.sum(axis=-1, keepdims=True),),
    )
