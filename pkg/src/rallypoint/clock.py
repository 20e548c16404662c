"""Wall and virtual clocks; timed behavior is testable against the latter."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone


class WallClock:
    """Real time, monotone by construction of the reading."""

    def __init__(self):
        self._last = datetime.now(timezone.utc)

    def now(self) -> datetime:
        current = datetime.now(timezone.utc)
        if current < self._last:
            current = self._last
        self._last = current
        return current


class VirtualClock:
    """Manually advanced time for simulations; never moves backwards."""

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ValueError("virtual clock start must be timezone-aware")
        self._now = start

    def now(self) -> datetime:
        return self._now

    def advance(self, delta: timedelta) -> datetime:
        if delta < timedelta(0):
            raise ValueError("cannot advance a clock backwards")
        self._now += delta
        return self._now

    def advance_to(self, target: datetime) -> datetime:
        if target < self._now:
            raise ValueError("cannot advance a clock backwards")
        self._now = target
        return self._now
