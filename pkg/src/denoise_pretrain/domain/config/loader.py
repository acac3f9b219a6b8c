from pathlib import Path
from typing import Any, Dict

import yaml

from denoise_pretrain.errors import ConfigError

from .defaults import DEF_CON, RECIPES
from .merge import deep_merge, normalize


def load_yaml(path_str: str | Path) -> Dict[str, Any]:
    path = Path(path_str).expanduser().resolve()
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config file must contain a top level mapping")
    return data


def parse_scalar(text: str) -> Any:
    """ --set values are read as YAML scalars: 1e-4, true, null, [H, C] """
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError:
        return text


def recipe_layer(name: str | None) -> Dict[str, Any]:
    if name is None:
        return {}
    try:
        return RECIPES[str(name)]
    except KeyError:
        raise ConfigError(f"unknown recipe {name!r}; valid recipes: {', '.join(sorted(RECIPES))}") from None


def build_config(raw: Dict[str, Any], recipe: str | None = None) -> Dict[str, Any]:
    """ defaults <- recipe <- file """
    normalized = normalize(raw)
    name = recipe if recipe is not None else normalized.pop("recipe", None)
    normalized.pop("recipe", None)
    return deep_merge(deep_merge(DEF_CON, recipe_layer(name)), normalized)
