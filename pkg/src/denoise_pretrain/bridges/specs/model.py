from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Literal, Mapping

from denoise_pretrain.errors import ConfigError

LOGGER = logging.getLogger(__name__)

Variant = Literal["gns", "gns_tat"]
ActivationName = Literal["shifted_softplus", "tailored_lrelu"]
Aggregation = Literal["sum", "mean"]
NoiseReadout = Literal["vertex", "directional"]


@dataclass(frozen=True)
class GNSConfig:
    """
    Graph network topology.

    variant=gns keeps shifted softplus and the configured decoder aggregation.
    variant=gns_tat always uses tailored leaky ReLUs, Edge-Delta init,
    weighted shortcuts and mean decoder aggregation; resolve() applies that.
    noise_readout=vertex reads noise from vertex latents only; directional adds
    edge scalars times unit displacements.
    """

    n_mp_layers: int = 10
    n_block_iterations: int = 3
    latent: int = 32
    mlp_hidden: int = 64
    mlp_layers: int = 3
    activation: ActivationName = "shifted_softplus"
    decoder_aggregation: Aggregation = "sum"
    variant: Variant = "gns"
    decoder_mlp_layers: int = 2
    n_basis: int = 8
    tat_eta: float = 0.8
    shortcut_weight: float = 0.9
    noise_readout: NoiseReadout = "directional"

    def to_record(self) -> dict[str, object]:
        return asdict(self)

    @property
    def is_tat(self) -> bool:
        return self.variant == "gns_tat"

    @property
    def residual_blocks(self) -> int:
        """ weighted-shortcut blocks along the deepest edge path """
        return self.n_mp_layers * self.n_block_iterations

    @property
    def depth(self) -> int:
        return self.mlp_layers * self.residual_blocks

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "GNSConfig":
        values: dict[str, Any] = {}
        keys = {
            "n_mp_layers": ("message_passing_layers", int),
            "n_block_iterations": ("block_iterations", int),
            "latent": ("vertex_edge_latent_vector_sizes", int),
            "mlp_hidden": ("mlp_hidden_sizes", int),
            "mlp_layers": ("mlp_number_of_layers", int),
            "activation": ("activation", str),
            "decoder_aggregation": ("decoder_aggregation", str),
            "variant": ("variant", str),
            "decoder_mlp_layers": ("decoder_mlp_number_of_layers", int),
            "n_basis": ("distance_basis_size", int),
            "tat_eta": ("tat_eta", float),
            "shortcut_weight": ("shortcut_weight", float),
            "noise_readout": ("noise_readout", str),
        }
        for field_name, (key, cast) in keys.items():
            if raw.get(key) is not None:
                try:
                    values[field_name] = cast(raw[key])
                except (TypeError, ValueError):
                    raise ConfigError(f"{key}: cannot read {raw[key]!r} as {cast.__name__}") from None
        for name in ("activation", "decoder_aggregation", "variant", "noise_readout"):
            if name in values:
                values[name] = values[name].lower()
        spec = cls(**values).resolve()
        spec.validate()
        return spec

    @classmethod
    def from_config(cls, config: Any) -> "GNSConfig":
        return cls.from_mapping(config.flat())

    def resolve(self) -> "GNSConfig":
        if self.variant == "gns" and self.activation != "shifted_softplus":
            LOGGER.info("variant gns uses shifted_softplus; ignoring activation=%s", self.activation)
            return replace(self, activation="shifted_softplus")
        if self.variant == "gns_tat" and (
            self.activation != "tailored_lrelu" or self.decoder_aggregation != "mean"
        ):
            LOGGER.info("variant gns_tat uses tailored_lrelu with mean decoder aggregation")
            return replace(self, activation="tailored_lrelu", decoder_aggregation="mean")
        return self

    def validate(self) -> None:
        if self.variant not in ("gns", "gns_tat"):
            raise ConfigError(f"variant must be gns or gns_tat, got {self.variant!r}")
        if self.activation not in ("shifted_softplus", "tailored_lrelu"):
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.decoder_aggregation not in ("sum", "mean"):
            raise ConfigError(f"decoder_aggregation must be sum or mean, got {self.decoder_aggregation!r}")
        if self.noise_readout not in ("vertex", "directional"):
            raise ConfigError(f"noise_readout must be vertex or directional, got {self.noise_readout!r}")
        counts = {
            "message_passing_layers": self.n_mp_layers,
            "block_iterations": self.n_block_iterations,
            "vertex_edge_latent_vector_sizes": self.latent,
            "mlp_hidden_sizes": self.mlp_hidden,
            "mlp_number_of_layers": self.mlp_layers,
            "decoder_mlp_number_of_layers": self.decoder_mlp_layers,
            "distance_basis_size": self.n_basis,
        }
        for key, value in counts.items():
            if value < 1:
                raise ConfigError(f"{key} must be >= 1, got {value}")
        if not 0.0 < self.tat_eta < 1.0:
            raise ConfigError(f"tat_eta must lie in (0, 1), got {self.tat_eta}")
        if not 0.0 < self.shortcut_weight < 1.0:
            raise ConfigError(f"shortcut_weight must lie in (0, 1), got {self.shortcut_weight}")
