"""Application configuration loaded from a dotenv file, the environment and flags."""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values

from app.errors import ConfigError

ENV_PREFIX = "DISASTER_"
DEFAULT_CONFIG_FILE = "disaster.env"


@dataclass(frozen=True)
class Settings:
    """Application settings."""

    # Reproducibility
    seed: int = 7
    workers: int = 1

    # Artifacts
    out_dir: str = "./artifacts"

    # Database
    database_url: str = "sqlite:///disaster_runs.db"
    record_runs: bool = True

    # Numerics
    series_tolerance: float = 1e-12
    max_terms: int = 10_000_000

    # Simulation
    max_events: int = 10_000_000
    prime_max: int = 997


def _coerce(name: str, kind, raw: str):
    """Convert a raw string from a dotenv file or the environment."""
    if kind is bool or kind == "bool":
        lowered = str(raw).strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name} expects a boolean, got {raw!r}")
    try:
        if kind is int or kind == "int":
            return int(float(raw)) if "e" in str(raw).lower() else int(raw)
        if kind is float or kind == "float":
            return float(raw)
    except ValueError as e:
        raise ConfigError(f"{name} expects {kind}, got {raw!r}") from e
    return str(raw)


def _from_mapping(values: dict) -> dict:
    """Pick the DISASTER_* keys out of a mapping and coerce them."""
    parsed = {}
    for field in fields(Settings):
        key = ENV_PREFIX + field.name.upper()
        raw = values.get(key)
        if raw is None or raw == "":
            continue
        parsed[field.name] = _coerce(key, field.type, raw)
    return parsed


def load_settings(config_file: Optional[str] = None, **overrides) -> Settings:
    """Build settings with precedence flags > environment > config file > defaults.

    ``overrides`` holds flag values; ``None`` means the flag was not given.
    """
    path = config_file or os.getenv(ENV_PREFIX + "CONFIG")
    if path is None and Path(DEFAULT_CONFIG_FILE).exists():
        path = DEFAULT_CONFIG_FILE

    layered = {}
    if path is not None:
        if not Path(path).exists():
            raise ConfigError(f"config file not found: {path}")
        layered.update(_from_mapping(dotenv_values(path)))
    layered.update(_from_mapping(dict(os.environ)))

    known = {field.name for field in fields(Settings)}
    for name, value in overrides.items():
        if value is None:
            continue
        if name not in known:
            raise ConfigError(f"unknown setting: {name}")
        layered[name] = value

    return replace(Settings(), **layered)


settings = load_settings()
