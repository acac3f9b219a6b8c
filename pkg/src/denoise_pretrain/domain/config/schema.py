""" denoise_pretrain.domain.config.schema

    PURPOSE:
        - one validated, layered configuration for every command

    BEHAVIOR:
        - layers: built-in defaults <- recipe <- YAML file <- --set overrides
        - keys are normalized (- becomes _) and must exist in the defaults;
          anything else raises ConfigError listing every valid key
        - every key name is unique across sections, so flat() gives the
          single namespace the typed specs read from

    PUBLIC:
        Config
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping

from denoise_pretrain.errors import ConfigError

from .defaults import DEF_CON, SECTIONS
from .loader import build_config, load_yaml, parse_scalar
from .merge import normalize

_KEY_SECTION: Dict[str, str] = {key: section for section in SECTIONS for key in DEF_CON[section]}


def valid_keys() -> list[str]:
    return sorted(_KEY_SECTION)


def _unknown(names: Iterable[str]) -> ConfigError:
    listed = ", ".join(sorted(names))
    return ConfigError(f"unknown config key(s): {listed}; valid keys: {', '.join(valid_keys())}")


def _check_keys(merged: Mapping[str, Any]) -> None:
    bad: list[str] = []
    for section, body in merged.items():
        if section not in SECTIONS:
            bad.append(section)
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"config section {section!r} must be a mapping")
        bad.extend(f"{section}.{key}" for key in body if key not in DEF_CON[section])
    if bad:
        raise _unknown(bad)


def parse_overrides(items: Iterable[str]) -> Dict[str, Any]:
    """ ["key=value", ...] -> {key: parsed value} """
    out: Dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        out[key.strip().replace("-", "_")] = parse_scalar(value.strip())
    return out


class Config:
    def __init__(self, merged: Dict[str, Any], source: Path | None = None) -> None:
        _check_keys(merged)
        self.merged = merged
        self.source = source

    @classmethod
    def load(
        cls,
        path: str | Path | None = None,
        overrides: Iterable[str] | Mapping[str, Any] = (),
        recipe: str | None = None,
    ) -> "Config":
        raw = load_yaml(path) if path is not None else {}
        extra = dict(overrides) if isinstance(overrides, Mapping) else parse_overrides(overrides)
        if "recipe" in extra:
            recipe = extra.pop("recipe")
        config = cls(build_config(raw, recipe), Path(path) if path is not None else None)
        return config.with_overrides(extra) if extra else config

    @classmethod
    def from_mapping(cls, raw: Mapping[str, Any]) -> "Config":
        return cls(build_config(dict(raw)))

    @classmethod
    def from_json(cls, text: str) -> "Config":
        return cls(normalize(json.loads(text)))

    def with_overrides(self, overrides: Mapping[str, Any]) -> "Config":
        merged = json.loads(json.dumps(self.merged))
        bad = []
        for key, value in overrides.items():
            name = str(key).replace("-", "_")
            if "." in name:
                section, name = name.split(".", 1)
                if section not in SECTIONS or name not in DEF_CON[section]:
                    bad.append(str(key))
                    continue
            elif name in _KEY_SECTION:
                section = _KEY_SECTION[name]
            else:
                bad.append(str(key))
                continue
            merged[section][name] = value
        if bad:
            raise _unknown(bad)
        return Config(merged, self.source)

    def section(self, name: str) -> Dict[str, Any]:
        if name not in SECTIONS:
            raise ConfigError(f"unknown config section {name!r}; sections: {', '.join(SECTIONS)}")
        return dict(self.merged.get(name) or {})

    def flat(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for section in SECTIONS:
            out.update(self.merged.get(section) or {})
        return out

    def get(self, key: str, default: Any = None) -> Any:
        return self.flat().get(key, default)

    def __getitem__(self, key: str) -> Any:
        flat = self.flat()
        if key not in flat:
            raise _unknown([key])
        return flat[key]

    @property
    def seed(self) -> int:
        return int(self["seed"])

    def to_json(self) -> str:
        return json.dumps(self.merged, sort_keys=True)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()
