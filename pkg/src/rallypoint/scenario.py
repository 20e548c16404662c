"""Executable mission scenarios: clock advances, feed events, expectations.

A scenario file is UTF-8 JSON lines. The first line may be a header
record ``{"header": {...}}`` with the mission's spec fields (absolute RFC
3339 timestamps or ISO-8601 offsets from the clock start), the clock
start, and config overrides. Every other line holds exactly one of:

    {"advance": "PT4H"}
    {"inject": {"kind": "PostObserved", "payload": {...}}}
    {"expect": {"phase": "Voting", ...}}

Runs are deterministic: fresh engine, virtual clock, simulated feed. The
report is line-oriented too - one ``{"step", "status", "observed"}``
record per expect step.
"""

from __future__ import annotations

import json
import tempfile
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from . import core
from .clock import VirtualClock
from .config import EngineConfig
from .engine import Engine
from .store import MissionLogStore
from .timeutil import format_ts, parse_duration, parse_ts
from .transport import SimulatedFeed, event_from_record

DEFAULT_CLOCK_START = "2014-05-01T12:00:00Z"

STEP_KEYS = ("advance", "inject", "expect")

EXPECT_KEYS = ("phase", "winner_key", "idea_count", "tally", "message",
               "message_kinds", "leader", "seconds_to_next_stage")


class MalformedScript(Exception):
    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step}: {reason}")
        self.step = step


@dataclass(frozen=True)
class Step:
    index: int
    kind: str
    value: object


@dataclass(frozen=True)
class Scenario:
    header: dict
    steps: tuple


@dataclass
class StepResult:
    step: int
    status: str
    observed: dict

    def to_record(self) -> dict:
        return {"step": self.step, "status": self.status,
                "observed": self.observed}


@dataclass
class ScenarioReport:
    results: list

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def to_lines(self) -> list[str]:
        return [json.dumps(r.to_record(), sort_keys=True) for r in self.results]


def parse_scenario(text: str) -> Scenario:
    header: dict = {}
    steps: list[Step] = []
    for index, raw in enumerate(text.splitlines()):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedScript(index, f"not a JSON record: {exc}") from exc
        if not isinstance(record, dict):
            raise MalformedScript(index, "record must be a single object")
        if index == 0 and set(record) == {"header"}:
            header = record["header"]
            continue
        keys = [k for k in record if k in STEP_KEYS]
        if len(record) != 1 or len(keys) != 1:
            raise MalformedScript(
                index, f"need exactly one of {STEP_KEYS}, got {sorted(record)}")
        kind = keys[0]
        value = record[kind]
        if kind == "advance":
            try:
                duration = parse_duration(value)
            except (ValueError, TypeError) as exc:
                raise MalformedScript(index, f"bad duration: {exc}") from exc
            if duration.total_seconds() <= 0:
                raise MalformedScript(index, "advance must be positive")
        if kind == "expect":
            if not isinstance(value, dict) or not value:
                raise MalformedScript(index, "expect needs an assertion object")
            unknown = set(value) - set(EXPECT_KEYS)
            if unknown:
                raise MalformedScript(index,
                                      f"unknown expect keys {sorted(unknown)}")
        steps.append(Step(index, kind, value))
    return Scenario(header, tuple(steps))


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _resolve_time(value: str, start: datetime) -> datetime:
    if value.upper().startswith("P"):
        return start + parse_duration(value)
    return parse_ts(value)


def _mission_spec(header: dict, start: datetime) -> tuple[core.MissionSpec, Optional[str]]:
    mission = dict(header.get("mission", {}))
    spec = core.MissionSpec(
        name=mission.get("name", "Mission"),
        rationale=mission.get("rationale", ""),
        hashtag=mission.get("hashtag", "#mission"),
        selection_deadline=_resolve_time(
            mission.get("selection_deadline", "PT24H"), start),
        execution_time=_resolve_time(
            mission.get("execution_time", "PT48H"), start),
        creator=mission.get("creator", "creator"),
    )
    return spec, mission.get("kickoff_text")


def _resolve_post_ref(ref, transport):
    """``$last:<Kind>`` points at the newest outbound post of that kind."""
    if isinstance(ref, str) and ref.startswith("$last:"):
        wanted = ref.split(":", 1)[1]
        for post in reversed(transport.posts):
            if post.kind == wanted:
                return post.post_id
        raise ValueError(f"no outbound post of kind {wanted!r} yet")
    return ref


def run_scenario(scenario: Scenario, data_dir: Optional[str] = None,
                 transport=None) -> ScenarioReport:
    """Execute against a fresh engine on the virtual clock."""
    if data_dir is None:
        data_dir = tempfile.mkdtemp(prefix="scenario-")
    start = parse_ts(scenario.header.get("clock_start", DEFAULT_CLOCK_START))
    clock = VirtualClock(start)
    transport = transport if transport is not None else SimulatedFeed()
    config_overrides = dict(scenario.header.get("config", {}))
    for key, value in list(config_overrides.items()):
        if isinstance(value, str) and value.upper().startswith("P"):
            config_overrides[key] = parse_duration(value)
    config = EngineConfig(**config_overrides)
    engine = Engine(MissionLogStore(data_dir), transport, clock, config)

    spec, kickoff_text = _mission_spec(scenario.header, start)
    mission_id = engine.create_mission(spec, kickoff_text)

    results: list[StepResult] = []
    for step in scenario.steps:
        if step.kind == "advance":
            clock.advance(parse_duration(step.value))
            engine.run_once()
        elif step.kind == "inject":
            record = json.loads(json.dumps(step.value))
            payload = record.setdefault("payload", {})
            payload.setdefault("at", format_ts(clock.now()))
            for ref_key in ("repost_of", "reply_to", "post_id"):
                if ref_key in payload:
                    try:
                        payload[ref_key] = _resolve_post_ref(
                            payload[ref_key], transport)
                    except ValueError as exc:
                        raise MalformedScript(step.index, str(exc)) from exc
            try:
                event = event_from_record(record)
            except (KeyError, ValueError) as exc:
                raise MalformedScript(step.index,
                                      f"bad transport record: {exc}") from exc
            transport.inject(event)
            engine.ingest()
        else:
            observed = _evaluate(step.value, engine, mission_id, transport)
            status = "pass" if observed == step.value else "fail"
            results.append(StepResult(step.index, status, observed))
    return ScenarioReport(results)


def _evaluate(expected: dict, engine: Engine, mission_id: str,
              transport) -> dict:
    """Observed values for each asserted key, shaped like the assertion."""
    state = engine.state_of(mission_id)
    observed: dict = {}
    for key, want in expected.items():
        if key == "phase":
            observed[key] = state.phase.value
        elif key == "winner_key":
            if state.winner is None:
                observed[key] = None
            else:
                observed[key] = state.idea_by_id(state.winner).canonical_key
        elif key == "idea_count":
            observed[key] = len(state.ideas)
        elif key == "tally":
            by_id = {i.idea_id: i.canonical_key for i in state.ideas}
            observed[key] = {by_id[idea_id]: votes
                             for idea_id, votes in core.tally(state).items()}
        elif key == "message_kinds":
            observed[key] = [p.kind for p in transport.posts]
        elif key == "message":
            kind = want.get("kind")
            matching = [p for p in transport.posts if p.kind == kind]
            got = {"kind": kind}
            if "count" in want:
                got["count"] = len(matching)
            if "contains" in want:
                needle = want["contains"]
                got["contains"] = (needle if any(needle in p.text
                                                 for p in matching)
                                   else [p.text for p in matching])
            observed[key] = got
        elif key == "leader":
            ranking = core.contributor_ranking(state)
            observed[key] = ranking[0][0] if ranking else None
        elif key == "seconds_to_next_stage":
            view = engine.build_view(mission_id)
            observed[key] = view.get("seconds_to_next_stage")
    return observed
