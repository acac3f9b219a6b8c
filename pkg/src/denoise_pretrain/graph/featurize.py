""" denoise_pretrain.graph.featurize

    PURPOSE:
        - turn an interatomic distance into a fixed-length edge feature

    BEHAVIOR:
        - bessel: sqrt(2/r_cut) sin(k pi (d - r_min) / r_cut) / d, k = 1..n_basis
          (order-zero spherical Bessel radial basis)
        - gaussian: exp(-(d - mu_k)^2 / (2 sigma^2)), mu_k evenly spaced on [mu, r_cut]
        - distances are in dataset units; r_cut and sigma must use the same units

    PUBLIC:
        - FeaturizerSpec
        - featurize_distance(d, spec) -> (n_basis,)
        - featurize_distances(d, spec) -> (E, n_basis)
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Literal, Mapping

import numpy as np

from denoise_pretrain.errors import ConfigError, ContractViolation

Kind = Literal["bessel", "gaussian"]


@dataclass(frozen=True)
class FeaturizerSpec:
    kind: Kind = "bessel"
    n_basis: int = 8
    r_cut: float = 3.0
    r_min: float = 0.0
    sigma: float = 1.0
    mu: float = 0.0

    def to_record(self) -> dict[str, object]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "FeaturizerSpec":
        spec = cls(
            kind=str(raw.get("distance_featurization", cls.kind)).lower(),  # type: ignore[arg-type]
            n_basis=int(raw.get("distance_basis_size", cls.n_basis)),
            r_cut=float(raw.get("connectivity_radius", cls.r_cut)),
            r_min=float(raw.get("featurization_r_min", cls.r_min)),
            sigma=float(raw.get("featurization_sigma", cls.sigma)),
            mu=float(raw.get("featurization_mu", cls.mu)),
        )
        spec.validate()
        return spec

    @classmethod
    def from_config(cls, config: Any) -> "FeaturizerSpec":
        return cls.from_mapping(config.flat())

    def validate(self) -> None:
        if self.kind not in ("bessel", "gaussian"):
            raise ConfigError(f"distance_featurization must be bessel or gaussian, got {self.kind!r}")
        if self.n_basis < 1:
            raise ConfigError("distance_basis_size must be >= 1")
        if self.sigma <= 0:
            raise ConfigError("featurization_sigma must be > 0")
        if self.r_cut <= 0:
            raise ConfigError("connectivity_radius must be > 0")

    @property
    def centers(self) -> np.ndarray:
        return np.linspace(self.mu, self.r_cut, self.n_basis)


def featurize_distances(distances: np.ndarray, spec: FeaturizerSpec) -> np.ndarray:
    d = np.asarray(distances, dtype=np.float64).reshape(-1, 1)
    if spec.kind == "bessel":
        if d.size and np.any(d <= 0):
            raise ContractViolation("bessel featurization needs strictly positive distances")
        k = np.arange(1, spec.n_basis + 1, dtype=np.float64).reshape(1, -1)
        return np.sqrt(2.0 / spec.r_cut) * np.sin(k * np.pi * (d - spec.r_min) / spec.r_cut) / d
    mu = spec.centers.reshape(1, -1)
    return np.exp(-((d - mu) ** 2) / (2.0 * spec.sigma**2))


def featurize_distance(d: float, spec: FeaturizerSpec) -> np.ndarray:
    return featurize_distances(np.array([d]), spec)[0]
