"""Runtime settings from the environment and an optional JSON config file."""

import json
import logging
import os
from pathlib import Path
from typing import Dict, Optional

from pydantic import BaseModel, Field

from .coeff import RingSpec, Specialization

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "hecke.json"


class ConfigError(ValueError):
    """Unreadable config file or unknown named specialization."""


class Settings(BaseModel):
    """
    Settings shared by the CLI and the HTTP service.

    Environment variables win over the config file for the fields they name.
    """

    cache_dir: Path = Path(".hecke_cache")
    seed: int = 7
    run_slow: bool = False
    max_dim: int = 50000
    max_len: int = 64
    jobs: int = 1
    specializations: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    config_file: Optional[Path] = None

    def specialization(self, text: str, ring: RingSpec) -> Specialization:
        """``@name`` looks up a named point, anything else is parsed as ``a=1/2,c=3``."""
        if text.startswith("@"):
            name = text[1:]
            if name not in self.specializations:
                raise ConfigError(f"Unknown specialization '@{name}' (known: {sorted(self.specializations)})")
            return Specialization(ring, self.specializations[name])
        return Specialization.parse(text, ring)


def _truthy(value: str) -> bool:
    return value.strip().lower() in ("1", "true", "yes", "on")


def load_settings(config_file: Optional[str] = None) -> Settings:
    """
    Build Settings from HECKE_CONFIG (or ``config_file``), then the environment.

    Args:
        config_file: Explicit JSON file; overrides HECKE_CONFIG

    Returns:
        Settings
    """
    data: Dict[str, object] = {}
    path = config_file or os.getenv("HECKE_CONFIG")
    if path is None and Path(DEFAULT_CONFIG_FILE).is_file():
        path = DEFAULT_CONFIG_FILE
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e
        data["config_file"] = path
        logger.info(f"📂 Loaded config from {path}")

    if os.getenv("HECKE_CACHE_DIR"):
        data["cache_dir"] = os.getenv("HECKE_CACHE_DIR")
    if os.getenv("HECKE_SEED"):
        data["seed"] = int(os.getenv("HECKE_SEED"))
    if os.getenv("HECKE_RUN_SLOW"):
        data["run_slow"] = _truthy(os.getenv("HECKE_RUN_SLOW"))
    return Settings.model_validate(data)
