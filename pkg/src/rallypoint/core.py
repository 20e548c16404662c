"""Pure, event-sourced state machine for a mission's life cycle.

A mission moves through Ideation → Voting → Planning → ActionPending →
Completed, with Failed (no ideas at the selection deadline) and Cancelled
as the other terminal states. The append-only event list is the sole
source of state: ``apply_event`` is the only mutator, and folding the same
events always yields the same ``MissionState``.

Command helpers (``submit_idea``, ``cast_vote``, ...) validate against the
current state and return the events to append; they never mutate.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from typing import Any, Optional

from .canonical import canonicalize
from .timeutil import format_ts, parse_ts

HASHTAG_RE = re.compile(r"^#[a-z0-9_]{1,30}$")
NAME_LIMIT = 60

DEFAULT_IDEATION = timedelta(hours=4)
DEFAULT_REMINDER_LEAD = timedelta(hours=1)


class MissionError(Exception):
    """Base for all domain rule violations."""


class InvalidSchedule(MissionError):
    pass


class InvalidHashtag(MissionError):
    pass


class EmptyName(MissionError):
    pass


class NameTooLong(MissionError):
    pass


class SequenceGap(MissionError):
    pass


class IllegalInPhase(MissionError):
    pass


class EmptyAfterCanonicalization(MissionError):
    pass


class UnknownIdea(MissionError):
    pass


class Phase(str, Enum):
    IDEATION = "Ideation"
    VOTING = "Voting"
    PLANNING = "Planning"
    ACTION_PENDING = "ActionPending"
    COMPLETED = "Completed"
    FAILED = "Failed"
    CANCELLED = "Cancelled"

    @property
    def terminal(self) -> bool:
        return self in (Phase.COMPLETED, Phase.FAILED, Phase.CANCELLED)


# Forward transitions driven by PhaseTransitioned events. Cancellation is a
# separate event kind and is legal from any non-terminal phase.
LEGAL_TRANSITIONS = frozenset(
    {
        (Phase.IDEATION, Phase.VOTING),
        (Phase.VOTING, Phase.PLANNING),
        (Phase.VOTING, Phase.FAILED),
        (Phase.PLANNING, Phase.ACTION_PENDING),
        (Phase.ACTION_PENDING, Phase.COMPLETED),
    }
)


class EventKind(str, Enum):
    MISSION_CREATED = "MissionCreated"
    IDEA_SUBMITTED = "IdeaSubmitted"
    VOTE_CAST = "VoteCast"
    DETAIL_ADDED = "DetailAdded"
    PHASE_TRANSITIONED = "PhaseTransitioned"
    MESSAGE_POSTED = "MessagePosted"
    SUBSCRIPTION_CHANGED = "SubscriptionChanged"
    MISSION_CANCELLED = "MissionCancelled"


# Which event kinds the reducer accepts per phase. PhaseTransitioned follows
# LEGAL_TRANSITIONS instead; MissionCreated is only legal as the first event.
# MessagePosted is system plumbing, not a participant command: it stays legal
# in Completed/Failed so a pending announcement delayed by an outage can still
# be recorded, but never in Cancelled.
_KIND_PHASES = {
    EventKind.IDEA_SUBMITTED: {Phase.IDEATION, Phase.VOTING},
    EventKind.VOTE_CAST: {Phase.IDEATION, Phase.VOTING},
    EventKind.DETAIL_ADDED: {Phase.PLANNING, Phase.ACTION_PENDING},
    EventKind.SUBSCRIPTION_CHANGED: {p for p in Phase if not p.terminal},
    EventKind.MISSION_CANCELLED: {p for p in Phase if not p.terminal},
    EventKind.MESSAGE_POSTED: {p for p in Phase if p is not Phase.CANCELLED},
}


@dataclass(frozen=True)
class MissionSpec:
    """The five creation-form fields plus the creator's handle."""

    name: str
    rationale: str
    hashtag: str
    selection_deadline: datetime
    execution_time: datetime
    creator: str

    def normalized(self) -> "MissionSpec":
        return dataclasses.replace(
            self, name=self.name.strip(), hashtag=self.hashtag.strip().lower()
        )


def validate_spec(spec: MissionSpec, now: datetime) -> MissionSpec:
    """Normalize and check a spec against the creation-time invariants."""
    spec = spec.normalized()
    if not spec.name:
        raise EmptyName("mission name is empty")
    if len(spec.name) > NAME_LIMIT:
        raise NameTooLong(f"mission name over {NAME_LIMIT} code points")
    if not HASHTAG_RE.match(spec.hashtag):
        raise InvalidHashtag(f"bad hashtag {spec.hashtag!r}")
    if not (now < spec.selection_deadline < spec.execution_time):
        raise InvalidSchedule(
            "need creation < selection_deadline < execution_time, got "
            f"{format_ts(now)} / {format_ts(spec.selection_deadline)} / "
            f"{format_ts(spec.execution_time)}"
        )
    return spec


@dataclass(frozen=True)
class Idea:
    idea_id: str
    canonical_key: str
    display_text: str
    author: str
    first_seen: datetime
    endorsers: frozenset = frozenset()


@dataclass(frozen=True)
class Detail:
    author: str
    text: str
    at: datetime


@dataclass(frozen=True)
class PostedMessage:
    kind: str
    post_id: str
    dedup_token: str
    text: str
    at: datetime


@dataclass(frozen=True)
class Contributor:
    ideas: int = 0
    details: int = 0
    endorsed: frozenset = frozenset()
    first_active: Optional[datetime] = None


@dataclass(frozen=True)
class Event:
    """One appended fact. ``seq`` runs contiguously from 1 per mission."""

    seq: int
    mission_id: str
    at: datetime
    kind: EventKind
    payload: dict

    def to_record(self) -> dict:
        """Wire/log form with stable field names (schema version 1)."""
        return {
            "v": 1,
            "seq": self.seq,
            "mission_id": self.mission_id,
            "at": format_ts(self.at),
            "kind": self.kind.value,
            "payload": self.payload,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Event":
        return cls(
            seq=record["seq"],
            mission_id=record["mission_id"],
            at=parse_ts(record["at"]),
            kind=EventKind(record["kind"]),
            payload=record["payload"],
        )


@dataclass(frozen=True)
class MissionState:
    mission_id: str
    spec: MissionSpec
    created_at: datetime
    phase: Phase
    ideas: tuple = ()
    winner: Optional[str] = None
    details: tuple = ()
    subscriptions: dict = field(default_factory=dict)
    messages: tuple = ()
    contributors: dict = field(default_factory=dict)
    seen_posts: frozenset = frozenset()
    post_ideas: dict = field(default_factory=dict)
    kickoff_text: Optional[str] = None
    last_seq: int = 0
    last_at: Optional[datetime] = None

    def idea_by_id(self, idea_id: str) -> Optional[Idea]:
        for idea in self.ideas:
            if idea.idea_id == idea_id:
                return idea
        return None

    def idea_by_key(self, key: str) -> Optional[Idea]:
        for idea in self.ideas:
            if idea.canonical_key == key:
                return idea
        return None

    def posted_tokens(self) -> frozenset:
        return frozenset(m.dedup_token for m in self.messages)


# ---------------------------------------------------------------------------
# Commands: validate against state, return events to append.
# ---------------------------------------------------------------------------

def create_mission(spec: MissionSpec, now: datetime, mission_id: str = "m1",
                   kickoff_text: Optional[str] = None
                   ) -> tuple[MissionState, Event]:
    """Validate a spec and open the mission in Ideation.

    ``kickoff_text`` preserves a creator-edited kickoff so it survives a
    crash between creation and the actual feed post.
    """
    spec = validate_spec(spec, now)
    payload = {
        "name": spec.name,
        "rationale": spec.rationale,
        "hashtag": spec.hashtag,
        "selection_deadline": format_ts(spec.selection_deadline),
        "execution_time": format_ts(spec.execution_time),
        "creator": spec.creator,
    }
    if kickoff_text is not None:
        payload["kickoff_text"] = kickoff_text
    event = Event(
        seq=1,
        mission_id=mission_id,
        at=now,
        kind=EventKind.MISSION_CREATED,
        payload=payload,
    )
    return apply_event(None, event), event


def _next_idea_id(state: MissionState) -> str:
    return f"i{len(state.ideas) + 1:04d}"


def submit_idea(state: MissionState, author: str, raw_text: str,
                now: datetime, bot_handle: str = "",
                source_post_id: Optional[str] = None) -> list[Event]:
    """Turn free text into a new idea, or merge into an existing one.

    A submission whose canonical key already exists becomes an endorsement
    of the existing idea; a repeat endorsement yields no event at all.
    """
    if state.phase not in (Phase.IDEATION, Phase.VOTING):
        raise IllegalInPhase(f"ideas not accepted in {state.phase.value}")
    key = canonicalize(raw_text, state.spec.hashtag, bot_handle)
    if not key:
        raise EmptyAfterCanonicalization("no content left after canonicalization")
    existing = state.idea_by_key(key)
    if existing is not None:
        if author in existing.endorsers:
            return []
        return [_vote_event(state, existing.idea_id, author, "submission",
                            now, source_post_id)]
    payload: dict[str, Any] = {
        "idea_id": _next_idea_id(state),
        "canonical_key": key,
        "display_text": raw_text,
        "author": author,
    }
    if source_post_id:
        payload["source_post_id"] = source_post_id
    return [Event(state.last_seq + 1, state.mission_id, now,
                  EventKind.IDEA_SUBMITTED, payload)]


def _vote_event(state: MissionState, idea_id: str, voter: str, vote_kind: str,
                now: datetime, source_post_id: Optional[str]) -> Event:
    payload: dict[str, Any] = {
        "idea_id": idea_id,
        "voter": voter,
        "vote_kind": vote_kind,
    }
    if source_post_id:
        payload["source_post_id"] = source_post_id
    return Event(state.last_seq + 1, state.mission_id, now,
                 EventKind.VOTE_CAST, payload)


def cast_vote(state: MissionState, voter: str, idea_id: str, kind: str,
              now: datetime,
              source_post_id: Optional[str] = None) -> list[Event]:
    """Endorse an idea by repost or favorite; once per (voter, idea)."""
    if state.phase not in (Phase.IDEATION, Phase.VOTING):
        raise IllegalInPhase(f"votes not accepted in {state.phase.value}")
    if kind not in ("repost", "favorite"):
        raise ValueError(f"unknown vote kind {kind!r}")
    idea = state.idea_by_id(idea_id)
    if idea is None:
        raise UnknownIdea(f"no idea {idea_id!r}")
    if voter in idea.endorsers:
        return []
    return [_vote_event(state, idea_id, voter, kind, now, source_post_id)]


def add_detail(state: MissionState, author: str, text: str, now: datetime,
               source_post_id: Optional[str] = None) -> list[Event]:
    if state.phase not in (Phase.PLANNING, Phase.ACTION_PENDING):
        raise IllegalInPhase(f"details not accepted in {state.phase.value}")
    payload: dict[str, Any] = {"author": author, "text": text}
    if source_post_id:
        payload["source_post_id"] = source_post_id
    return [Event(state.last_seq + 1, state.mission_id, now,
                  EventKind.DETAIL_ADDED, payload)]


def set_subscription(state: MissionState, participant: str,
                     phases: list[Phase], now: datetime) -> list[Event]:
    if state.phase.terminal:
        raise IllegalInPhase("mission is over")
    wanted = frozenset(phases)
    if state.subscriptions.get(participant, frozenset()) == wanted:
        return []
    payload = {"participant": participant,
               "phases": sorted(p.value for p in wanted)}
    return [Event(state.last_seq + 1, state.mission_id, now,
                  EventKind.SUBSCRIPTION_CHANGED, payload)]


def cancel_mission(state: MissionState, by: str, now: datetime) -> list[Event]:
    if state.phase.terminal:
        raise IllegalInPhase("mission is over")
    return [Event(state.last_seq + 1, state.mission_id, now,
                  EventKind.MISSION_CANCELLED, {"by": by})]


def message_posted(state: MissionState, kind: str, text: str, post_id: str,
                   dedup_token: str, now: datetime,
                   reply_to: Optional[str] = None) -> Event:
    """Record that an outbound message went to the feed."""
    payload: dict[str, Any] = {
        "message_kind": kind,
        "text": text,
        "post_id": post_id,
        "dedup_token": dedup_token,
    }
    if reply_to:
        payload["reply_to"] = reply_to
    return Event(state.last_seq + 1, state.mission_id, now,
                 EventKind.MESSAGE_POSTED, payload)


# ---------------------------------------------------------------------------
# Reducer
# ---------------------------------------------------------------------------

def apply_event(state: Optional[MissionState], event: Event) -> MissionState:
    """Fold one event into the state; the sole state mutator.

    Deterministic: depends only on (state, event). Raises SequenceGap on a
    non-contiguous seq and IllegalInPhase when the event kind is not
    accepted in the current phase (terminal phases accept no participant
    commands; see _KIND_PHASES for the one plumbing exception).
    """
    if state is None:
        if event.kind is not EventKind.MISSION_CREATED or event.seq != 1:
            raise SequenceGap("log must start with MissionCreated seq 1")
        p = event.payload
        spec = MissionSpec(
            name=p["name"],
            rationale=p["rationale"],
            hashtag=p["hashtag"],
            selection_deadline=parse_ts(p["selection_deadline"]),
            execution_time=parse_ts(p["execution_time"]),
            creator=p["creator"],
        )
        return MissionState(
            mission_id=event.mission_id,
            spec=spec,
            created_at=event.at,
            phase=Phase.IDEATION,
            kickoff_text=p.get("kickoff_text"),
            last_seq=1,
            last_at=event.at,
        )

    if event.seq != state.last_seq + 1:
        raise SequenceGap(
            f"expected seq {state.last_seq + 1}, got {event.seq}")
    if event.kind is EventKind.MISSION_CREATED:
        raise IllegalInPhase("mission already created")

    if event.kind is EventKind.PHASE_TRANSITIONED:
        target = Phase(event.payload["to_phase"])
        if (state.phase, target) not in LEGAL_TRANSITIONS:
            raise IllegalInPhase(
                f"no transition {state.phase.value} -> {target.value}")
    elif state.phase not in _KIND_PHASES[event.kind]:
        raise IllegalInPhase(
            f"{event.kind.value} not legal in {state.phase.value}")

    new = dict(last_seq=event.seq, last_at=event.at)
    p = event.payload

    if event.kind is EventKind.IDEA_SUBMITTED:
        if state.idea_by_key(p["canonical_key"]) is not None:
            raise ValueError(f"duplicate canonical key {p['canonical_key']!r}")
        idea = Idea(
            idea_id=p["idea_id"],
            canonical_key=p["canonical_key"],
            display_text=p["display_text"],
            author=p["author"],
            first_seen=event.at,
            endorsers=frozenset({p["author"]}),
        )
        new["ideas"] = state.ideas + (idea,)
        new["contributors"] = _credit(state.contributors, p["author"],
                                      event.at, ideas=1)
        if p.get("source_post_id"):
            new["seen_posts"] = state.seen_posts | {p["source_post_id"]}
            new["post_ideas"] = {**state.post_ideas,
                                 p["source_post_id"]: idea.idea_id}

    elif event.kind is EventKind.VOTE_CAST:
        idea = state.idea_by_id(p["idea_id"])
        if idea is None:
            raise UnknownIdea(f"vote for unknown idea {p['idea_id']!r}")
        if p["voter"] not in idea.endorsers:
            updated = dataclasses.replace(
                idea, endorsers=idea.endorsers | {p["voter"]})
            new["ideas"] = tuple(
                updated if i.idea_id == idea.idea_id else i
                for i in state.ideas)
            new["contributors"] = _credit(state.contributors, p["voter"],
                                          event.at, endorsed=idea.idea_id)
        if p.get("source_post_id"):
            new["seen_posts"] = state.seen_posts | {p["source_post_id"]}
            new["post_ideas"] = {**state.post_ideas,
                                 p["source_post_id"]: p["idea_id"]}

    elif event.kind is EventKind.DETAIL_ADDED:
        new["details"] = state.details + (
            Detail(p["author"], p["text"], event.at),)
        new["contributors"] = _credit(state.contributors, p["author"],
                                      event.at, details=1)
        if p.get("source_post_id"):
            new["seen_posts"] = state.seen_posts | {p["source_post_id"]}

    elif event.kind is EventKind.PHASE_TRANSITIONED:
        target = Phase(p["to_phase"])
        new["phase"] = target
        if target is Phase.PLANNING:
            new["winner"] = select_winner(state)

    elif event.kind is EventKind.MESSAGE_POSTED:
        new["messages"] = state.messages + (PostedMessage(
            kind=p["message_kind"],
            post_id=p["post_id"],
            dedup_token=p["dedup_token"],
            text=p["text"],
            at=event.at,
        ),)

    elif event.kind is EventKind.SUBSCRIPTION_CHANGED:
        subs = dict(state.subscriptions)
        phases = frozenset(Phase(v) for v in p["phases"])
        if phases:
            subs[p["participant"]] = phases
        else:
            subs.pop(p["participant"], None)
        new["subscriptions"] = subs

    elif event.kind is EventKind.MISSION_CANCELLED:
        new["phase"] = Phase.CANCELLED
        new["winner"] = None  # a cancelled mission has no standing selection

    return dataclasses.replace(state, **new)


def _credit(contributors: dict, who: str, at: datetime, ideas: int = 0,
            details: int = 0, endorsed: Optional[str] = None) -> dict:
    prev = contributors.get(who, Contributor())
    updated = Contributor(
        ideas=prev.ideas + ideas,
        details=prev.details + details,
        endorsed=prev.endorsed | {endorsed} if endorsed else prev.endorsed,
        first_active=prev.first_active or at,
    )
    return {**contributors, who: updated}


def replay(events: list[Event]) -> MissionState:
    """Fold a full event list from scratch."""
    state: Optional[MissionState] = None
    for event in events:
        state = apply_event(state, event)
    if state is None:
        raise ValueError("empty event list")
    return state


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------

def _tally_order(idea: Idea) -> tuple:
    return (-len(idea.endorsers), idea.first_seen, idea.idea_id)


def tally(state: MissionState) -> dict:
    """Endorser counts, ordered by votes desc, first_seen asc, idea_id asc."""
    ranked = sorted(state.ideas, key=_tally_order)
    return {idea.idea_id: len(idea.endorsers) for idea in ranked}


def select_winner(state: MissionState) -> Optional[str]:
    """First idea in tally order, or None when the mission has no ideas."""
    ranked = sorted(state.ideas, key=_tally_order)
    return ranked[0].idea_id if ranked else None


def contributor_ranking(state: MissionState) -> list[tuple[str, int]]:
    """Activity leaders: 3 per idea, 2 per detail, 1 per distinct idea endorsed."""
    def score(c: Contributor) -> int:
        return 3 * c.ideas + 2 * c.details + len(c.endorsed)

    ranked = sorted(
        state.contributors.items(),
        key=lambda kv: (-score(kv[1]), kv[1].first_active, kv[0]),
    )
    return [(who, score(c)) for who, c in ranked]


# ---------------------------------------------------------------------------
# Deadline-driven transitions
# ---------------------------------------------------------------------------

def voting_prompt_time(created_at: datetime, selection_deadline: datetime,
                       default_ideation: timedelta = DEFAULT_IDEATION) -> datetime:
    """Ideation ends after the configured spell, capped at half the span."""
    span = selection_deadline - created_at
    return created_at + min(default_ideation, span / 2)


def transition_schedule(
    state: MissionState,
    default_ideation: timedelta = DEFAULT_IDEATION,
    reminder_lead: timedelta = DEFAULT_REMINDER_LEAD,
) -> list[tuple[Phase, datetime]]:
    """The nominal forward path with its trigger times.

    The ActionPending trigger is clamped to the selection deadline so the
    chain stays in chronological order even when the reminder lead is
    longer than the planning window.
    """
    spec = state.spec
    prompt = voting_prompt_time(state.created_at, spec.selection_deadline,
                                default_ideation)
    reminder = max(spec.execution_time - reminder_lead,
                   spec.selection_deadline)
    return [
        (Phase.VOTING, prompt),
        (Phase.PLANNING, spec.selection_deadline),
        (Phase.ACTION_PENDING, reminder),
        (Phase.COMPLETED, spec.execution_time),
    ]


def pending_schedule(
    state: MissionState,
    default_ideation: timedelta = DEFAULT_IDEATION,
    reminder_lead: timedelta = DEFAULT_REMINDER_LEAD,
) -> list[tuple[Phase, datetime]]:
    """The remaining (target, trigger) pairs from the current phase on."""
    if state.phase.terminal:
        return []
    order = [Phase.IDEATION, Phase.VOTING, Phase.PLANNING,
             Phase.ACTION_PENDING]
    position = order.index(state.phase)
    return transition_schedule(state, default_ideation, reminder_lead)[position:]


def due_transitions(
    state: MissionState,
    now: datetime,
    default_ideation: timedelta = DEFAULT_IDEATION,
    reminder_lead: timedelta = DEFAULT_REMINDER_LEAD,
) -> list[Event]:
    """Every PhaseTransitioned whose trigger has passed, in trigger order.

    Walks the remaining chain, so a long-asleep caller catches up through
    several phases in one call. A Voting exit with zero ideas becomes the
    Failed transition and ends the chain. Applying the result and calling
    again with the same ``now`` returns nothing.
    """
    events: list[Event] = []
    seq = state.last_seq
    phase = state.phase
    last_at = state.last_at or state.created_at
    for target, trigger in pending_schedule(state, default_ideation,
                                            reminder_lead):
        if trigger > now:
            break
        if target is Phase.PLANNING and not state.ideas:
            target = Phase.FAILED
        seq += 1
        at = max(trigger, last_at)
        events.append(Event(
            seq=seq,
            mission_id=state.mission_id,
            at=at,
            kind=EventKind.PHASE_TRANSITIONED,
            payload={
                "from_phase": phase.value,
                "to_phase": target.value,
                "trigger_time": format_ts(trigger),
            },
        ))
        last_at = at
        phase = target
        if target is Phase.FAILED:
            break
    return events
