# util/config_loader.py
# ---------------------------------------------------------
# Loads YAML configuration for benchmark runs.
#
# Layering (later wins):
#   config.yaml (repository defaults)
#   configs/<preset>.yaml
#   user config file
# Sections are merged key by key; lists are replaced whole.
#
# Uses Pathlib; paths resolve against the repository root so runs do
# not depend on the working directory.
# ---------------------------------------------------------

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from util.errors import ConfigError
from util.logger import get_logger

logger = get_logger("util.config_loader")

PROJECT_ROOT = Path(__file__).resolve().parent.parent
CONFIG_PATH = PROJECT_ROOT / "config.yaml"
PRESET_DIR = PROJECT_ROOT / "configs"
PRESETS = ("fig4", "fig5", "ci")


def load_yaml(path: Path | str) -> dict:
    """Read one YAML file into a dict; an empty file is an empty dict."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found at: {path.resolve()}")

    try:
        with path.open("r", encoding="utf-8") as f:
            content = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigError(f"Malformed YAML in {path}: {exc}") from exc

    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ConfigError(f"{path} must hold a mapping at top level, got {type(content).__name__}")
    return content


def load_config() -> dict:
    """Repository defaults from config.yaml."""
    return load_yaml(CONFIG_PATH)


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset {name!r}; choose one of {', '.join(PRESETS)}")
    return PRESET_DIR / f"{name}.yaml"


def deep_merge(base: dict, override: dict) -> dict:
    merged: dict[str, Any] = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_layered(config_file: Path | str | None = None, preset: str | None = None) -> dict:
    """Defaults, then preset, then the user's file."""
    cfg = load_config()
    if preset:
        cfg = deep_merge(cfg, load_yaml(preset_path(preset)))
        logger.info(f"Applied preset: {preset}")
    if config_file:
        cfg = deep_merge(cfg, load_yaml(config_file))
        logger.info(f"Applied config file: {Path(config_file).resolve()}")
    return cfg
