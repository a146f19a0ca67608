"""Configuration files (YAML or JSON) merged under command-line flags."""
from __future__ import annotations

import json
from pathlib import Path

import yaml


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must hold a mapping at top level")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def merge(config: dict, flags: dict) -> dict:
    """Flags that were given (not ``None``) override config values."""
    merged = dict(config)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged
