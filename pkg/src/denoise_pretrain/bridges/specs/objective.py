from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Literal, Mapping

from denoise_pretrain.errors import ConfigError

DenoiseTarget = Literal["noise", "relaxed"]


@dataclass(frozen=True)
class NoiseSpec:
    """
    Gaussian corruption p~ = p + sigma * eps.

    mean_center projects eps onto zero-centroid displacements before it is
    applied, so the target carries no translation component.
    target selects plain denoising ("noise") or the interpolation variant
    toward the relaxed frame ("relaxed").
    """

    sigma: float = 0.02
    mean_center: bool = True
    seed: int = 0
    target: DenoiseTarget = "noise"

    def to_record(self) -> dict[str, object]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "NoiseSpec":
        spec = cls(
            sigma=float(raw.get("position_noise_sigma", cls.sigma)),
            mean_center=bool(raw.get("mean_center_noise", cls.mean_center)),
            seed=int(raw.get("seed", cls.seed)),
            target=str(raw.get("denoise_target", cls.target)).lower(),  # type: ignore[arg-type]
        )
        spec.validate()
        return spec

    @classmethod
    def from_config(cls, config: Any) -> "NoiseSpec":
        return cls.from_mapping(config.flat())

    def validate(self) -> None:
        if self.sigma < 0:
            raise ConfigError(f"position_noise_sigma must be >= 0, got {self.sigma}")
        if self.target not in ("noise", "relaxed"):
            raise ConfigError(f"denoise_target must be noise or relaxed, got {self.target!r}")


@dataclass(frozen=True)
class LossWeights:
    position_coeff: float = 1.0
    target_coeff: float = 0.0
    atom_type_coeff: float = 4.0
    atom_mask_prob: float = 0.75

    def to_record(self) -> dict[str, object]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "LossWeights":
        spec = cls(
            position_coeff=float(raw.get("position_loss_coefficient", cls.position_coeff)),
            target_coeff=float(raw.get("target_loss_coefficient", cls.target_coeff)),
            atom_type_coeff=float(raw.get("atom_type_loss_coefficient", cls.atom_type_coeff)),
            atom_mask_prob=float(raw.get("atom_type_mask_probability", cls.atom_mask_prob)),
        )
        spec.validate()
        return spec

    @classmethod
    def from_config(cls, config: Any) -> "LossWeights":
        return cls.from_mapping(config.flat())

    def validate(self) -> None:
        coeffs = (self.position_coeff, self.target_coeff, self.atom_type_coeff)
        if any(c < 0 for c in coeffs):
            raise ConfigError("loss coefficients must be >= 0")
        if not any(c > 0 for c in coeffs):
            raise ConfigError("at least one loss coefficient must be positive")
        if not 0.0 <= self.atom_mask_prob <= 1.0:
            raise ConfigError(f"atom_type_mask_probability must lie in [0, 1], got {self.atom_mask_prob}")
