from pathlib import Path
from typing import Any, Dict, Optional
import json
import logging

from dotenv import load_dotenv
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .models.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

# Load process settings from a .env file in the project root when present
load_dotenv(Path(__file__).parent.parent / ".env")


class Settings(BaseSettings):
    """Process-level settings read from DC_* environment variables"""
    model_config = SettingsConfigDict(env_prefix="DC_", extra="ignore")

    threads: Optional[int] = None
    log_level: str = "INFO"
    out_dir: str = "results"


def get_settings() -> Settings:
    return Settings()


def _decode(text: str, source: str) -> dict:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: expected a JSON object at the top level")
    return raw


def validate_config(raw: Dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"field '{'.'.join(str(p) for p in err['loc']) or '<root>'}': {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"{source}: {problems}") from e


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    return validate_config(_decode(text, source), source)


def read_config_document(config_path: str) -> Dict[str, Any]:
    """Raw JSON document of a config file; commands re-validate it with their overrides"""
    path = Path(config_path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    return _decode(path.read_text(encoding="utf-8"), str(path))


def load_config(config_path: str) -> ExperimentConfig:
    """Read and validate an experiment configuration file"""
    config = validate_config(read_config_document(config_path), source=str(config_path))
    logger.debug(f"Loaded config {config_path} (hash {config.config_hash()[:12]})")
    return config
