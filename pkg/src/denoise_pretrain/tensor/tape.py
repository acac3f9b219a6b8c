""" denoise_pretrain.tensor.tape

    PURPOSE:
        - immutable dense tensors and the Wengert list that records how they
          were produced, plus reverse accumulation over that list

    BEHAVIOR:
        - a Tensor without a tape is a constant; gradients never flow into it
        - every op appends exactly one OpRecord after its inputs exist, so the
          record list is already in topological order
        - grad() walks the records once in reverse, accumulating adjoints

    PUBLIC:
        - Tensor
        - Tape
        - OpRecord
        - constant(value, dtype) -> Tensor
        - grad(loss, params) -> list[Tensor]
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from denoise_pretrain.errors import ContractViolation

DEFAULT_DTYPE = np.float64

Backward = Callable[[np.ndarray], Sequence["np.ndarray | None"]]


class Tensor:
    """ read-only array plus an optional handle into a Tape """

    __slots__ = ("data", "tape", "node", "name")

    def __init__(
        self,
        data: np.ndarray,
        tape: "Tape | None" = None,
        node: int = -1,
        name: str | None = None,
    ) -> None:
        data.flags.writeable = False
        self.data = data
        self.tape = tape
        self.node = node
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def tracked(self) -> bool:
        return self.tape is not None

    def numpy(self) -> np.ndarray:
        return np.array(self.data, copy=True)

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractViolation(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, dtype={self.dtype}, node={self.node})"

    # operator sugar, resolved lazily to avoid an import cycle with ops
    def __add__(self, other: Any) -> "Tensor":
        from denoise_pretrain.tensor import ops

        return ops.plus(self, other)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "Tensor":
        from denoise_pretrain.tensor import ops

        return ops.minus(self, other)

    def __rsub__(self, other: Any) -> "Tensor":
        from denoise_pretrain.tensor import ops

        return ops.affine(self, -1.0, float(other))

    def __mul__(self, other: Any) -> "Tensor":
        from denoise_pretrain.tensor import ops

        return ops.times(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        from denoise_pretrain.tensor import ops

        return ops.affine(self, -1.0, 0.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        from denoise_pretrain.tensor import ops

        return ops.matmul(self, other)


@dataclass(frozen=True)
class OpRecord:
    name: str
    inputs: tuple[int, ...]
    output: int
    backward: Backward


class Tape:
    """ ordered op records for one forward pass """

    def __init__(self, dtype: np.dtype | type = DEFAULT_DTYPE) -> None:
        self.dtype = np.dtype(dtype)
        self.records: list[OpRecord] = []
        self.leaves: dict[int, str] = {}
        self._shapes: dict[int, tuple[int, ...]] = {}
        self._next = 0

    def __len__(self) -> int:
        return len(self.records)

    def _new_node(self, shape: tuple[int, ...]) -> int:
        node = self._next
        self._next += 1
        self._shapes[node] = shape
        return node

    def leaf(self, value: Any, name: str | None = None) -> Tensor:
        data = np.array(value, dtype=self.dtype, copy=True)
        if not np.all(np.isfinite(data)):
            raise ContractViolation(f"leaf {name or '<unnamed>'} has non-finite values")
        node = self._new_node(data.shape)
        self.leaves[node] = name or f"leaf{node}"
        return Tensor(data, self, node, name)

    def record(
        self,
        name: str,
        inputs: Sequence[Tensor],
        output: np.ndarray,
        backward: Backward,
    ) -> Tensor:
        for tensor in inputs:
            if tensor.tape is not None and tensor.tape is not self:
                raise ContractViolation(f"{name}: inputs recorded on different tapes")
        node = self._new_node(output.shape)
        self.records.append(
            OpRecord(
                name=name,
                inputs=tuple(t.node if t.tape is self else -1 for t in inputs),
                output=node,
                backward=backward,
            )
        )
        return Tensor(output, self, node)

    def shape_of(self, node: int) -> tuple[int, ...]:
        return self._shapes[node]


def constant(value: Any, dtype: np.dtype | type = DEFAULT_DTYPE) -> Tensor:
    return Tensor(np.array(value, dtype=dtype, copy=True))


def grad(loss: Tensor, params: Sequence[Tensor]) -> list[Tensor]:
    """
    reverse-mode gradients of a scalar loss with respect to tape leaves.

    params the loss does not depend on get a zero tensor of their own shape.
    """
    if loss.data.shape != () and loss.data.size != 1:
        raise ContractViolation(f"grad needs a scalar loss, got shape {loss.shape}")
    tape = loss.tape
    if tape is None:
        return [Tensor(np.zeros_like(p.data)) for p in params]
    for p in params:
        if p.tape is not tape or p.node not in tape.leaves:
            raise ContractViolation(f"grad target {p!r} is not a leaf of the loss tape")

    adjoints: dict[int, np.ndarray] = {loss.node: np.ones(loss.shape, dtype=loss.dtype)}
    for record in reversed(tape.records):
        upstream = adjoints.pop(record.output, None)
        if upstream is None:
            continue
        local = record.backward(upstream)
        for node, contribution in zip(record.inputs, local):
            if node < 0 or contribution is None:
                continue
            if node in adjoints:
                adjoints[node] = adjoints[node] + contribution
            else:
                adjoints[node] = np.asarray(contribution, dtype=tape.dtype)

    out: list[Tensor] = []
    for p in params:
        value = adjoints.get(p.node)
        if value is None:
            value = np.zeros(p.shape, dtype=p.dtype)
        out.append(Tensor(np.array(value, dtype=p.dtype).reshape(p.shape), name=p.name))
    return out
