"""Engine configuration: timing knobs, retry policy, bot identity.

Values come from defaults, then an optional JSON config file, then
``RALLYPOINT_*`` environment variables; durations are ISO-8601 strings.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from datetime import timedelta
from typing import Optional

from .timeutil import parse_duration

_DURATION_KEYS = ("default_ideation", "reminder_lead", "max_sleep",
                  "retry_base", "retry_cap")


@dataclass(frozen=True)
class EngineConfig:
    default_ideation: timedelta = timedelta(hours=4)
    reminder_lead: timedelta = timedelta(hours=1)
    max_sleep: timedelta = timedelta(seconds=30)
    retry_base: timedelta = timedelta(seconds=1)
    retry_cap: timedelta = timedelta(minutes=5)
    bot_handle: str = "@rally"
    templates_path: Optional[str] = None


def load_config(path: Optional[str] = None,
                env: Optional[dict] = None) -> EngineConfig:
    """Merge defaults <- config file <- RALLYPOINT_* environment."""
    values: dict = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            values.update(json.load(fh))
    env = os.environ if env is None else env
    for spec_field in fields(EngineConfig):
        env_key = f"RALLYPOINT_{spec_field.name.upper()}"
        if env_key in env:
            values[spec_field.name] = env[env_key]
    known = {f.name for f in fields(EngineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in _DURATION_KEYS:
        if key in values and isinstance(values[key], str):
            values[key] = parse_duration(values[key])
    return EngineConfig(**values)
