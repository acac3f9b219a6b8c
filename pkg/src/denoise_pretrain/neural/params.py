""" denoise_pretrain.neural.params

    PURPOSE:
        - named parameter arrays with the init scheme each one came from

    BEHAVIOR:
        - names are unique; insertion order is kept and is the canonical
          order for optimizer state and checkpoints
        - arrays are copied on the way in and out; the store is the only
          mutable owner of model weights
        - attach(tape) registers every array as a leaf and returns the
          name -> Tensor view a forward pass reads from

    PUBLIC:
        - ParamStore
"""

from __future__ import annotations

import hashlib
from typing import Iterator, Mapping

import numpy as np

from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.tensor import Tape, Tensor


class ParamStore:
    def __init__(self) -> None:
        self._arrays: dict[str, np.ndarray] = {}
        self.schemes: dict[str, str] = {}

    def __len__(self) -> int:
        return len(self._arrays)

    def __contains__(self, name: object) -> bool:
        return name in self._arrays

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def names(self, prefix: str = "") -> list[str]:
        return [n for n in self._arrays if n.startswith(prefix)]

    def add(self, name: str, value: np.ndarray, scheme: str) -> None:
        if name in self._arrays:
            raise ContractViolation(f"parameter {name!r} already exists")
        self._arrays[name] = np.array(value, dtype=np.float64, copy=True)
        self.schemes[name] = scheme

    def get(self, name: str) -> np.ndarray:
        try:
            return self._arrays[name].copy()
        except KeyError:
            raise ContractViolation(f"unknown parameter {name!r}") from None

    def view(self, name: str) -> np.ndarray:
        """ read-only alias, no copy """
        out = self._arrays[name].view()
        out.flags.writeable = False
        return out

    def set(self, name: str, value: np.ndarray, scheme: str | None = None) -> None:
        if name not in self._arrays:
            raise ContractViolation(f"unknown parameter {name!r}")
        arr = np.asarray(value, dtype=np.float64)
        if arr.shape != self._arrays[name].shape:
            raise ContractViolation(
                f"parameter {name!r}: shape {arr.shape} != stored {self._arrays[name].shape}"
            )
        self._arrays[name] = arr.copy()
        if scheme is not None:
            self.schemes[name] = scheme

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        for name in self._arrays:
            yield name, self.view(name)

    def shapes(self) -> dict[str, tuple[int, ...]]:
        return {n: a.shape for n, a in self._arrays.items()}

    def size(self) -> int:
        return int(sum(a.size for a in self._arrays.values()))

    def copy(self) -> "ParamStore":
        out = ParamStore()
        for name, arr in self._arrays.items():
            out.add(name, arr, self.schemes[name])
        return out

    def as_dict(self) -> dict[str, np.ndarray]:
        return {n: a.copy() for n, a in self._arrays.items()}

    @classmethod
    def from_arrays(cls, arrays: Mapping[str, np.ndarray], schemes: Mapping[str, str] | None = None) -> "ParamStore":
        out = cls()
        for name, arr in arrays.items():
            out.add(name, arr, (schemes or {}).get(name, "loaded"))
        return out

    def constants(self) -> dict[str, Tensor]:
        """ untracked tensors for tape-free evaluation """
        return {name: Tensor(self.view(name)) for name in self._arrays}

    def attach(self, tape: Tape) -> dict[str, Tensor]:
        return {name: tape.leaf(arr, name) for name, arr in self._arrays.items()}

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for name, arr in self._arrays.items():
            digest.update(name.encode("utf-8"))
            digest.update(np.ascontiguousarray(arr).tobytes())
        return digest.hexdigest()

    def equal(self, other: "ParamStore", prefix: str = "") -> bool:
        names = self.names(prefix)
        if names != other.names(prefix):
            return False
        return all(np.array_equal(self._arrays[n], other._arrays[n]) for n in names)
