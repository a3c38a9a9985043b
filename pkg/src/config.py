"""
Run configuration loading.

Configs are flat key=value files (parsed with python-dotenv, so `#` comments and
blank lines are ignored) or a previously written run manifest (JSON), whose
"config" block is re-used as is. Keys match model fields case-insensitively;
`--set key=value` overrides win over the file.

Environment defaults (a .env file in the working directory is honoured):
    HERMITE_KINETICS_OUT_DIR    Default output directory (runs/)
    HERMITE_KINETICS_LOG_LEVEL  Logging level for the CLI (INFO)
    HERMITE_KINETICS_MAX_DEGREE Hermite degree cap (128)

Usage:
    from src.config import resolve_config
    from src.models import VPConfig

    cfg = resolve_config(VPConfig, "configs/landau.cfg", ["k=2", "T=0.5"])
"""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Any, Iterable, Optional, TypeVar

import pydantic
from dotenv import dotenv_values, load_dotenv

from src.errors import ConfigError, ValidationError

logger = logging.getLogger(__name__)

load_dotenv()

DEFAULT_OUT_DIR = "runs"
DEFAULT_LOG_LEVEL = "INFO"

# pydantic error types that mean "could not read this value" rather than
# "read it fine, but it breaks a constraint"
PARSE_ERROR_TYPES = frozenset(
    {
        "missing",
        "extra_forbidden",
        "enum",
        "literal_error",
        "bool_parsing",
        "bool_type",
        "int_parsing",
        "int_type",
        "int_from_float",
        "float_parsing",
        "float_type",
        "string_type",
    }
)

ModelT = TypeVar("ModelT", bound=pydantic.BaseModel)


def default_out_dir() -> Path:
    return Path(os.getenv("HERMITE_KINETICS_OUT_DIR", DEFAULT_OUT_DIR))


def log_level() -> str:
    return os.getenv("HERMITE_KINETICS_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()


def load_config_values(path: Path) -> dict[str, Any]:
    """Raw key/value pairs from a flat config file or a run manifest."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a JSON object")
        return dict(data.get("config", data))
    return dict(dotenv_values(path))


def parse_overrides(items: Iterable[str]) -> dict[str, str]:
    """['k=2', 'nu = 0.5'] -> {'k': '2', 'nu': '0.5'}."""
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Override must look like key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _canonical_keys(model_cls: type[pydantic.BaseModel], raw: dict[str, Any]) -> dict[str, Any]:
    fields = {name.lower(): name for name in model_cls.model_fields}
    out: dict[str, Any] = {}
    for key, value in raw.items():
        if value is None or value == "":
            continue
        out[fields.get(key.strip().lower(), key.strip())] = value
    return out


def _classify(exc: pydantic.ValidationError, source: str) -> Exception:
    errors = exc.errors()
    details = "; ".join(
        f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in errors
    )
    if any(err["type"] in PARSE_ERROR_TYPES for err in errors):
        return ConfigError(f"Invalid config {source}: {details}")
    return ValidationError(f"Config {source} violates constraints: {details}")


def resolve_config(
    model_cls: type[ModelT],
    path: Optional[Path] = None,
    overrides: Iterable[str] = (),
) -> ModelT:
    """Load, merge and validate a run configuration."""
    raw: dict[str, Any] = load_config_values(path) if path is not None else {}
    raw.update(parse_overrides(overrides))
    data = _canonical_keys(model_cls, raw)
    source = str(path) if path is not None else "<overrides>"
    try:
        cfg = model_cls.model_validate(data)
    except pydantic.ValidationError as exc:
        raise _classify(exc, source) from exc
    logger.debug(f"Resolved {model_cls.__name__} from {source}: {cfg.model_dump()}")
    return cfg
