""" denoise_pretrain.neural.tat

    PURPOSE:
        - tailored leaky-ReLU construction for the GNS-TAT variant: local and
          network C maps, the slope solver and Edge-Delta initialization

    BEHAVIOR:
        - the slope is solved on the cosine map of the second-moment
          normalized leaky ReLU sqrt(2 / (1 + a^2)) * lrelu(x, a) (cmap_lrelu)
        - the network activation is that leaky ReLU scaled and shifted to
          zero mean and unit second moment; its cosine map is
          (C(c) - C(0)) / (1 - C(0)), which never increases |c|
        - the network map composes mlp_layers local maps per residual block
          and mixes with the shortcut as w^2 c_in + (1 - w^2) c_branch
        - the slope is the root of C_net(0) = eta on [0, 1]; C_net(0) falls
          from its ReLU value at a = 0 to 0 at a = 1, so larger eta gives a
          smaller slope and deeper networks give a slope closer to 1
        - layer norms are treated as transparent for q/c propagation

    PUBLIC:
        - TailoredActivation
        - QCState
        - cmap_lrelu(c, alpha) -> float | ndarray
        - centered_cmap(c, alpha) -> float | ndarray
        - network_cmap(config, alpha) -> Callable[[c], c_out]
        - solve_tat_slope(config, eta) -> TailoredActivation
        - edge_delta_init(store, config, rng) -> ParamStore
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from denoise_pretrain.bridges.specs.model import GNSConfig
from denoise_pretrain.errors import ContractViolation, SolverError
from denoise_pretrain.neural import layout
from denoise_pretrain.neural.params import ParamStore
from denoise_pretrain.tensor import Tensor
from denoise_pretrain.tensor import ops

LOGGER = logging.getLogger(__name__)

SOLVER_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TailoredActivation:
    negative_slope: float
    output_scale: float
    output_shift: float
    eta: float

    @classmethod
    def from_slope(cls, alpha: float, eta: float) -> "TailoredActivation":
        """ scale = 1 / sqrt((1 + a^2) / 2 - (1 - a)^2 / (2 pi)), shift removes the mean """
        if not 0.0 <= alpha <= 1.0:
            raise ContractViolation(f"negative slope must lie in [0, 1], got {alpha}")
        raw_mean = (1.0 - alpha) / np.sqrt(2.0 * np.pi)
        raw_variance = (1.0 + alpha * alpha) / 2.0 - raw_mean * raw_mean
        scale = 1.0 / np.sqrt(raw_variance)
        return cls(
            negative_slope=float(alpha),
            output_scale=float(scale),
            output_shift=float(-scale * raw_mean),
            eta=float(eta),
        )

    def __call__(self, x: Tensor) -> Tensor:
        return ops.affine(ops.leaky_relu(x, self.negative_slope), self.output_scale, self.output_shift)

    def numpy(self, x: np.ndarray) -> np.ndarray:
        a = self.negative_slope
        return self.output_scale * np.where(x >= 0, x, a * x) + self.output_shift

    @property
    def mean(self) -> float:
        """ E[phi(u)] for u ~ N(0, 1) """
        return self.output_scale * (1.0 - self.negative_slope) / np.sqrt(2.0 * np.pi) + self.output_shift

    def cmap(self, c: float | np.ndarray) -> float | np.ndarray:
        return centered_cmap(c, self.negative_slope)


def cmap_lrelu(c: float | np.ndarray, alpha: float) -> float | np.ndarray:
    """ cosine map of the q-normalized leaky ReLU with negative slope alpha """
    arr = np.asarray(c, dtype=np.float64)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ContractViolation(f"c values must lie in [-1, 1], got {c}")
    arr = np.clip(arr, -1.0, 1.0)
    gain = (1.0 - alpha) ** 2 / (1.0 + alpha * alpha)
    out = arr + gain * (np.sqrt(1.0 - arr * arr) - arr * np.arccos(arr)) / np.pi
    return float(out) if np.ndim(out) == 0 else out


def centered_cmap(c: float | np.ndarray, alpha: float) -> float | np.ndarray:
    """ cosine map of the zero-mean, unit-variance leaky ReLU used inside the network """
    origin = cmap_lrelu(0.0, alpha)
    out = (np.asarray(cmap_lrelu(c, alpha)) - origin) / (1.0 - origin)
    return float(out) if np.ndim(out) == 0 else out


def residual_cmap(
    n_blocks: int,
    mlp_layers: int,
    alpha: float,
    shortcut_weight: float = 0.9,
) -> Callable[[float], float]:
    w2 = shortcut_weight * shortcut_weight

    def compose(c: float) -> float:
        for _ in range(n_blocks):
            branch = c
            for _ in range(mlp_layers):
                branch = cmap_lrelu(branch, alpha)
            c = w2 * c + (1.0 - w2) * branch
        return c

    return compose


def network_cmap(config: GNSConfig, alpha: float) -> Callable[[float], float]:
    return residual_cmap(config.residual_blocks, config.mlp_layers, alpha, config.shortcut_weight)


def solve_slope(
    n_blocks: int,
    mlp_layers: int,
    eta: float,
    shortcut_weight: float = 0.9,
) -> TailoredActivation:
    if not 0.0 < eta < 1.0:
        raise ContractViolation(f"eta must lie in (0, 1), got {eta}")

    def residual(alpha: float) -> float:
        return residual_cmap(n_blocks, mlp_layers, alpha, shortcut_weight)(0.0) - eta

    low, high = residual(0.0), residual(1.0)
    if low * high > 0:
        raise SolverError(
            f"no slope brackets C_net(0) = {eta}: C_net(0) is {low + eta:.6g} at slope 0 "
            f"and {high + eta:.6g} at slope 1 ({n_blocks} blocks x {mlp_layers} layers)"
        )
    alpha = bisect(residual, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16, maxiter=400)
    miss = abs(residual(alpha))
    if miss >= SOLVER_TOLERANCE:
        raise SolverError(f"slope solver stopped with residual {miss:.3g}")
    LOGGER.debug("tailored slope %.12f for eta=%.3f, %d blocks", alpha, eta, n_blocks)
    return TailoredActivation.from_slope(alpha, eta)


def solve_tat_slope(config: GNSConfig, eta: float | None = None) -> TailoredActivation:
    return solve_slope(
        config.residual_blocks,
        config.mlp_layers,
        config.tat_eta if eta is None else eta,
        config.shortcut_weight,
    )


def edge_delta_init(store: ParamStore, config: GNSConfig, rng: np.random.Generator) -> ParamStore:
    """
    first linear layer of every edge MLP: edge rows N(0, 1/latent), sender and
    receiver rows zero, bias zero
    """
    width = config.latent
    for step in range(config.n_mp_layers):
        w, b = layout.linear(layout.edge_mlp(step), 0)
        shape = store.view(w).shape
        if shape[0] != 3 * width:
            raise ContractViolation(f"{w}: expected {3 * width} input rows, found {shape[0]}")
        weight = np.zeros(shape)
        weight[:width] = rng.normal(0.0, 1.0 / np.sqrt(width), size=(width, shape[1]))
        store.set(w, weight, "edge_delta")
        store.set(b, np.zeros(shape[1]), "zeros")
    return store


@dataclass(frozen=True)
class QCState:
    """ q: mean squared activation norm per dimension; c: mean cosine between inputs """

    q: float
    c: float

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ContractViolation(f"q must be >= 0, got {self.q}")
        if abs(self.c) > 1.0 + 1e-12:
            raise ContractViolation(f"c must lie in [-1, 1], got {self.c}")
