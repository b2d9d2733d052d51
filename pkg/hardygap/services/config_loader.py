"""
YAML run configuration loading and emission
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from pydantic import ValidationError

from hardygap.core.config import settings
from hardygap.core.exceptions import ConfigError
from hardygap.models.params import DomainSpec
from hardygap.models.run_config import RunConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def default_run_config() -> RunConfig:
    """Annulus(1, 2), alpha = 0, p = 2, N = 2"""
    return RunConfig(domain=DomainSpec.annulus(1.0, 2.0), alpha=0.0, p=2.0, dim=2)


def parse_run_config(data: Optional[Dict[str, Any]]) -> RunConfig:
    """Validate a mapping into a RunConfig"""
    if data is None:
        raise ConfigError("configuration is empty")
    if not isinstance(data, dict):
        raise ConfigError(f"configuration must be a mapping, got {type(data).__name__}")
    version = data.get("schema_version", settings.SCHEMA_VERSION)
    if str(version) != settings.SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}, expected {settings.SCHEMA_VERSION!r}")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        logger.error(f"invalid run configuration: {exc.error_count()} errors")
        raise ConfigError(f"invalid run configuration: {exc}", exc.errors()) from exc


def load_run_config(path: Optional[PathLike]) -> RunConfig:
    """Read a YAML run configuration; no path means the default configuration"""
    if path is None:
        return default_run_config()
    path = Path(path)
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"configuration {path} is not valid YAML: {exc}") from exc
    logger.info(f"loaded configuration from {path}")
    return parse_run_config(data)


def run_config_to_dict(config: RunConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json")


def dump_run_config(config: RunConfig, path: Optional[PathLike] = None) -> str:
    """YAML text of ``config``, also written to ``path`` when given"""
    text = yaml.safe_dump(run_config_to_dict(config), default_flow_style=False, sort_keys=True)
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(text)
    return text
