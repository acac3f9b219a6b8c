""" denoise_pretrain.oracle.equivalence

    PURPOSE:
        - numerical check that score matching against the exact mixture
          score and denoising against the conditional target have the same
          parameter gradient

    BEHAVIOR:
        - samples are ancestral: a uniform center x_k, then
          x~ = x_k + sigma * z with z an isotropic Gaussian on V
        - J1 regresses mixture_score(x~); J2 regresses (x_k - x~) / sigma^2;
          both use the SAME samples (common random numbers)
        - the score model is a two-layer shifted-softplus net on flattened
          coordinates, differentiated with the tape
        - samples are split into min(100, n) groups of near-equal size; the
          gradient difference is the size-weighted group average and each
          parameter's standard error is the spread of its group values
        - z_p = |dJ1_p - dJ2_p| / se_p; the report carries the parameter with
          the largest z, its gap and its standard error, both divided by
          |grad J2| / sqrt(P) + 1e-12
        - within(k) holds when max z stays under the Student-t quantile
          that gives all P parameters together a k-sigma two-sided rate

    PUBLIC:
        - GapReport
        - init_score_network(n_coords, hidden, rng) -> dict[str, ndarray]
        - score_forward(params, x) -> Tensor
        - draw_pairs(mixture, n_samples, rng) -> (x~, conditional targets)
        - j1_j2_gradient_gap(model_params, mixture, n_samples, seed) -> GapReport
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import stats

from denoise_pretrain.errors import ContractViolation
from denoise_pretrain.oracle.score import MixtureModel, mixture_score, sample_subspace_noise
from denoise_pretrain.tensor import Tape, Tensor, grad
from denoise_pretrain.tensor import ops

LOGGER = logging.getLogger(__name__)

SCORE_NAMES = ("w1", "b1", "w2", "b2")
MAX_GROUPS = 100
Z_FLOOR = 1e-12


@dataclass(frozen=True)
class GapReport:
    gap: float
    standard_error: float
    max_z: float
    j1: float
    j2: float
    grad_norm: float
    n_params: int
    n_samples: int
    n_groups: int

    def z_threshold(self, n_errors: float = 3.0) -> float:
        """ per-parameter |z| bound with the family-wise rate of an n_errors two-sided test """
        return float(stats.t.isf(stats.norm.sf(n_errors) / self.n_params, df=self.n_groups - 1))

    def within(self, n_errors: float = 3.0) -> bool:
        return self.max_z <= self.z_threshold(n_errors)

    def to_record(self) -> dict[str, float | int]:
        return {
            "gap": self.gap,
            "standard_error": self.standard_error,
            "max_z": self.max_z,
            "j1": self.j1,
            "j2": self.j2,
            "grad_norm": self.grad_norm,
            "n_params": self.n_params,
            "n_samples": self.n_samples,
            "n_groups": self.n_groups,
        }


def init_score_network(n_coords: int, hidden: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    if n_coords < 1 or hidden < 1:
        raise ContractViolation("score network needs positive sizes")
    return {
        "w1": rng.normal(0.0, 1.0 / np.sqrt(n_coords), size=(n_coords, hidden)),
        "b1": rng.normal(0.0, 0.1, size=hidden),
        "w2": rng.normal(0.0, 1.0 / np.sqrt(hidden), size=(hidden, n_coords)),
        "b2": rng.normal(0.0, 0.1, size=n_coords),
    }


def score_forward(params: Mapping[str, Tensor], x: Tensor) -> Tensor:
    hidden = ops.shifted_softplus(ops.linear(x, params["w1"], params["b1"]))
    return ops.linear(hidden, params["w2"], params["b2"])


def draw_pairs(mixture: MixtureModel, n_samples: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """ noisy points and their conditional denoising targets (x_k - x~) / sigma^2 """
    picks = rng.integers(0, mixture.n_centers, size=n_samples)
    noise = sample_subspace_noise(mixture.n_atoms, n_samples, rng)
    clean = mixture.centers[picks]
    noisy = clean + mixture.sigma * noise
    return noisy, (clean - noisy) / mixture.sigma**2


def _half_sq_error(pred: Tensor, target: np.ndarray) -> Tensor:
    diff = ops.sub(pred, Tensor(target))
    return ops.affine(ops.reduce_sum(ops.square(diff)), 0.5 / target.shape[0], 0.0)


def _group_gradients(
    params: Mapping[str, np.ndarray],
    noisy: np.ndarray,
    score_target: np.ndarray,
    denoise_target: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, float, float]:
    tape = Tape()
    leaves = {name: tape.leaf(params[name], name) for name in SCORE_NAMES}
    pred = score_forward(leaves, Tensor(noisy))
    j1 = _half_sq_error(pred, score_target)
    j2 = _half_sq_error(pred, denoise_target)
    order = [leaves[name] for name in SCORE_NAMES]
    g1 = np.concatenate([g.numpy().ravel() for g in grad(j1, order)])
    g2 = np.concatenate([g.numpy().ravel() for g in grad(j2, order)])
    return g1, g2, j1.item(), j2.item()


def j1_j2_gradient_gap(
    model_params: Mapping[str, np.ndarray],
    mixture: MixtureModel,
    n_samples: int,
    seed: int,
) -> GapReport:
    if n_samples < 2:
        raise ContractViolation(f"a standard error needs n_samples >= 2, got {n_samples}")
    missing = [name for name in SCORE_NAMES if name not in model_params]
    if missing:
        raise ContractViolation(f"score-network parameters missing: {missing}")
    width = 3 * mixture.n_atoms
    if model_params["w1"].shape[0] != width or model_params["w2"].shape[1] != width:
        raise ContractViolation(f"score network does not take {width} coordinates")

    rng = np.random.default_rng(seed)
    noisy, denoise_target = draw_pairs(mixture, n_samples, rng)
    score_target = mixture_score(mixture, noisy)

    n_groups = min(MAX_GROUPS, n_samples)
    diffs, grads2, sizes = [], [], []
    j1_total = j2_total = 0.0
    for rows in np.array_split(np.arange(n_samples), n_groups):
        g1, g2, j1, j2 = _group_gradients(model_params, noisy[rows], score_target[rows], denoise_target[rows])
        diffs.append(g1 - g2)
        grads2.append(g2)
        sizes.append(rows.size)
        j1_total += j1 * rows.size
        j2_total += j2 * rows.size

    weights = np.asarray(sizes, dtype=np.float64) / n_samples
    diff = weights @ np.asarray(diffs)
    g2_mean = weights @ np.asarray(grads2)
    n_params = int(diff.size)
    scale = float(np.linalg.norm(g2_mean)) / math.sqrt(n_params) + 1e-12
    per_param_se = np.std(diffs, axis=0, ddof=1) / math.sqrt(n_groups)
    z = np.abs(diff) / np.maximum(per_param_se, Z_FLOOR * scale)
    worst = int(np.argmax(z))

    report = GapReport(
        gap=float(abs(diff[worst])) / scale,
        standard_error=float(per_param_se[worst]) / scale,
        max_z=float(z[worst]),
        j1=j1_total / n_samples,
        j2=j2_total / n_samples,
        grad_norm=float(np.linalg.norm(g2_mean)),
        n_params=n_params,
        n_samples=n_samples,
        n_groups=n_groups,
    )
    LOGGER.debug(
        "j1/j2 gap %.3g (se %.3g, max z %.2f) over %d samples in %d groups",
        report.gap, report.standard_error, report.max_z, n_samples, n_groups,
    )
    return report
