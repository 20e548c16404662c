"""Wake planning for deadline-driven transitions.

The plan is recomputed from mission state alone - there is no hidden
timer state, so a restarted process derives exactly the same wake-up
schedule. The engine's ``tick`` consumes due entries; this module decides
when the serve loop should next wake.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Optional

from . import core
from .core import MissionState


@dataclass(frozen=True)
class WakePlan:
    """Future triggers: (mission_id, trigger_time, target_phase)."""

    entries: frozenset

    def __len__(self) -> int:
        return len(self.entries)


def plan(states: Iterable[MissionState],
         default_ideation: timedelta = core.DEFAULT_IDEATION,
         reminder_lead: timedelta = core.DEFAULT_REMINDER_LEAD) -> WakePlan:
    """Derive every remaining trigger for every non-terminal mission."""
    entries = set()
    for state in states:
        for target, trigger in core.pending_schedule(state, default_ideation,
                                                     reminder_lead):
            entries.add((state.mission_id, trigger, target))
    return WakePlan(frozenset(entries))


def next_wake(wake_plan: WakePlan, now: datetime) -> Optional[datetime]:
    """Earliest trigger overall; an overdue one means wake immediately."""
    if not wake_plan.entries:
        return None
    return min(trigger for _, trigger, _ in wake_plan.entries)


def drive(engine, stop: threading.Event) -> None:
    """Serve loop: ingest + tick, then sleep until the next trigger.

    Sleep is bounded by max_sleep so clock skew and freshly created
    missions are picked up promptly.
    """
    max_sleep = engine.config.max_sleep.total_seconds()
    while not stop.is_set():
        engine.run_once()
        wake = engine.next_wake()
        if wake is None:
            pause = max_sleep
        else:
            pause = (wake - engine.clock.now()).total_seconds()
            pause = min(max(pause, 0.05), max_sleep)
        stop.wait(pause)
