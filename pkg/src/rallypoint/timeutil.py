"""RFC 3339 timestamp and ISO-8601 duration helpers.

All timestamps in the system are timezone-aware UTC datetimes; all wire and
log representations are RFC 3339 strings with a ``Z`` suffix. Durations in
config files and scenario scripts use ISO-8601 (``PT4H``, ``P1DT30M``).
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone

_DURATION_RE = re.compile(
    r"^P(?:(?P<days>\d+)D)?"
    r"(?:T(?:(?P<hours>\d+)H)?(?:(?P<minutes>\d+)M)?(?:(?P<seconds>\d+(?:\.\d+)?)S)?)?$"
)


def utc(year: int, month: int, day: int, hour: int = 0, minute: int = 0,
        second: int = 0) -> datetime:
    """Build a timezone-aware UTC datetime."""
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)


def format_ts(ts: datetime) -> str:
    """Render a datetime as an RFC 3339 UTC string (``2014-05-01T12:00:00Z``)."""
    ts = ts.astimezone(timezone.utc)
    if ts.microsecond:
        return ts.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_ts(text: str) -> datetime:
    """Parse an RFC 3339 timestamp; naive inputs are rejected."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp without zone offset: {text!r}")
    return ts.astimezone(timezone.utc)


def format_duration(delta: timedelta) -> str:
    """Render a non-negative timedelta as an ISO-8601 duration."""
    total = delta.total_seconds()
    if total < 0:
        raise ValueError("negative duration")
    days, rem = divmod(int(total), 86400)
    hours, rem = divmod(rem, 3600)
    minutes, seconds = divmod(rem, 60)
    frac = total - int(total)
    out = "P"
    if days:
        out += f"{days}D"
    time_part = ""
    if hours:
        time_part += f"{hours}H"
    if minutes:
        time_part += f"{minutes}M"
    if seconds or frac:
        if frac:
            time_part += f"{seconds + frac:g}S"
        else:
            time_part += f"{seconds}S"
    if time_part:
        out += "T" + time_part
    if out == "P":
        out = "PT0S"
    return out


def parse_duration(text: str) -> timedelta:
    """Parse an ISO-8601 duration limited to days/hours/minutes/seconds."""
    m = _DURATION_RE.match(text.strip().upper())
    if not m or text.strip().upper() == "P":
        raise ValueError(f"bad ISO-8601 duration: {text!r}")
    parts = m.groupdict()
    if not any(parts.values()):
        raise ValueError(f"bad ISO-8601 duration: {text!r}")
    return timedelta(
        days=int(parts["days"] or 0),
        hours=int(parts["hours"] or 0),
        minutes=int(parts["minutes"] or 0),
        seconds=float(parts["seconds"] or 0),
    )
