from datetime import timedelta

import pytest

from rallypoint.clock import VirtualClock
from rallypoint.config import EngineConfig
from rallypoint.core import MissionSpec
from rallypoint.engine import Engine
from rallypoint.store import MissionLogStore
from rallypoint.timeutil import utc
from rallypoint.transport import SimulatedFeed

T0 = utc(2014, 5, 1, 12)


def park_spec(**overrides):
    fields = dict(
        name="Park cleanup",
        rationale="our park deserves better",
        hashtag="#parkday",
        selection_deadline=T0 + timedelta(hours=24),
        execution_time=T0 + timedelta(hours=48),
        creator="haoqi",
    )
    fields.update(overrides)
    return MissionSpec(**fields)


@pytest.fixture
def rig(tmp_path):
    """A fresh engine on a virtual clock with a simulated feed."""

    class Rig:
        def __init__(self):
            self.data_dir = tmp_path / "data"
            self.clock = VirtualClock(T0)
            self.feed = SimulatedFeed()
            self.config = EngineConfig()
            self.engine = Engine(MissionLogStore(self.data_dir), self.feed,
                                 self.clock, self.config)

        def restart(self):
            """Simulate a process restart: fresh engine over the same disk."""
            self.engine.store.close()
            self.engine = Engine(MissionLogStore(self.data_dir), self.feed,
                                 self.clock, self.config)
            return self.engine

    return Rig()
