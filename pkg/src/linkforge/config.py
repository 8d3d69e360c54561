"""Pipeline configuration: defaults, key=value config files, env overrides.

Every CLI flag has a config-file key of the same name; flags win over the
file, the file wins over defaults. The LINKFORGE_BACKEND_URL environment
variable overrides the embedding backend endpoint everywhere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from linkforge.errors import ParseError

BACKEND_URL_ENV = "LINKFORGE_BACKEND_URL"


@dataclass(frozen=True)
class PipelineConfig:
    threshold_pct: float = 58.0
    include_name: bool = True
    backend: str = "local:deterministic"
    backend_id: str = "local-deterministic"
    dims: int = 384
    seed: int = 0
    top_k: int | None = None
    quorum: int = 2
    max_rounds: int = 2


_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(key: str, value: str, default):
    if isinstance(default, bool):
        lowered = value.lower()
        if lowered not in _BOOL_VALUES:
            raise ParseError(f"config key {key}: expected a boolean, got {value!r}")
        return _BOOL_VALUES[lowered]
    if isinstance(default, int) or default is None and key == "top_k":
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def load_config(path: str | Path | None) -> PipelineConfig:
    """Read a key=value config file; missing path means pure defaults."""
    config = PipelineConfig()
    if path is None:
        return _apply_env(config)
    text = Path(path).read_text(encoding="utf-8")
    updates = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", ";", "[")):
            continue
        if "=" not in stripped:
            raise ParseError(f"config line is not key=value: {stripped!r}", line=line_no)
        key, _, raw_value = stripped.partition("=")
        key = key.strip()
        if not hasattr(config, key):
            raise ParseError(f"unknown config key {key!r}", line=line_no)
        updates[key] = _coerce(key, raw_value.strip(), getattr(config, key))
    return _apply_env(replace(config, **updates))


def _apply_env(config: PipelineConfig) -> PipelineConfig:
    backend_url = os.environ.get(BACKEND_URL_ENV)
    if backend_url:
        config = replace(config, backend=backend_url)
    return config
