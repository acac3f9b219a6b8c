from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Mapping

from denoise_pretrain.errors import ConfigError


@dataclass(frozen=True)
class DataSpec:
    """
    Where structures come from.

    A missing upstream/downstream path means the bundled synthetic set of the
    given size; the downstream synthetic set uses seed + 1 so the two never
    coincide.
    """

    upstream_path: Path | None = None
    downstream_path: Path | None = None
    synthetic_upstream_size: int = 200
    synthetic_downstream_size: int = 100
    synthetic_elements: tuple[str, ...] = ("H", "C", "N", "O", "F")
    include_initial: bool = False
    target_label: str = "surrogate_energy"
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    upstream_fraction: float = 1.0

    def to_record(self) -> dict[str, object]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "DataSpec":
        def path(key: str) -> Path | None:
            value = raw.get(key)
            return Path(str(value)).expanduser() if value else None

        try:
            spec = cls(
                upstream_path=path("upstream_path"),
                downstream_path=path("downstream_path"),
                synthetic_upstream_size=int(raw.get("synthetic_upstream_size", cls.synthetic_upstream_size)),
                synthetic_downstream_size=int(raw.get("synthetic_downstream_size", cls.synthetic_downstream_size)),
                synthetic_elements=tuple(str(e) for e in raw.get("synthetic_elements") or cls.synthetic_elements),
                include_initial=bool(raw.get("include_initial", cls.include_initial)),
                target_label=str(raw.get("target_label", cls.target_label)),
                fractions=(
                    float(raw.get("train_fraction", 0.8)),
                    float(raw.get("valid_fraction", 0.1)),
                    float(raw.get("test_fraction", 0.1)),
                ),
                upstream_fraction=float(raw.get("upstream_fraction", cls.upstream_fraction)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"data section: {exc}") from None
        spec.validate()
        return spec

    @classmethod
    def from_config(cls, config: Any) -> "DataSpec":
        return cls.from_mapping(config.flat())

    def validate(self) -> None:
        if self.synthetic_upstream_size < 1 or self.synthetic_downstream_size < 1:
            raise ConfigError("synthetic dataset sizes must be >= 1")
        if any(f < 0 for f in self.fractions) or abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must be nonnegative and sum to 1, got {self.fractions}")
        if not 0.0 < self.upstream_fraction <= 1.0:
            raise ConfigError(f"upstream_fraction must lie in (0, 1], got {self.upstream_fraction}")
        if not self.synthetic_elements:
            raise ConfigError("synthetic_elements must name at least one element")
