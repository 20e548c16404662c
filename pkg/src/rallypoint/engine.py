"""Orchestration glue: commands, inbound ingest, deadline ticks, outbox.

One engine owns the command path for every mission in its store (the
single-writer contract); all mutations funnel through one lock, so
commands for a mission apply in a total order. Transitions are persisted
before their announcements are posted, outbound posts are deduplicated at
the transport by token, and the set of still-unsent announcements is
derived from the event log alone, so a crash anywhere between persist and
post is repaired on the next tick.

``crash_hook`` is a test seam: fault-injection suites raise from it at
named barrier points to simulate dying mid-sequence.
"""

from __future__ import annotations

import threading
from datetime import datetime, timedelta
from typing import Callable, Optional

from . import core, messages, scheduler
from .config import EngineConfig
from .core import Event, MissionSpec, MissionState, Phase
from .messages import (
    ACTION_REMINDER,
    KICKOFF,
    SELECTION_ANNOUNCEMENT,
    VOTE_PROMPT,
    Chatter,
    DetailReply,
    IdeaSubmission,
    InboundPost,
    OutboundMessage,
    VoteByRepost,
    classify,
    compose,
    default_templates,
    load_templates,
    validate_outbound,
)
from .store import MissionLogStore, NotFound
from .timeutil import format_ts, parse_ts
from .transport import EndorsementObserved, PostObserved, TransportDown

CURSOR_NAME = "feed"

# How far a mission got along the linear path; Failed implies Voting was
# reached (it is the no-ideas exit from Voting).
_PROGRESS = {
    Phase.IDEATION: 0,
    Phase.VOTING: 1,
    Phase.FAILED: 1,
    Phase.PLANNING: 2,
    Phase.ACTION_PENDING: 3,
    Phase.COMPLETED: 4,
}


class KickoffTooLong(Exception):
    """Edited kickoff text exceeds the platform limit."""


def selection_post_id(state: MissionState) -> Optional[str]:
    for message in state.messages:
        if message.kind == SELECTION_ANNOUNCEMENT:
            return message.post_id
    return None


class Engine:
    def __init__(self, store: MissionLogStore, transport, clock,
                 config: Optional[EngineConfig] = None):
        self.store = store
        self.transport = transport
        self.clock = clock
        self.config = config or EngineConfig()
        self.templates = (load_templates(self.config.templates_path)
                          if self.config.templates_path else default_templates())
        self.crash_hook: Optional[Callable[[str], None]] = None
        self._lock = threading.RLock()
        self._states: dict[str, MissionState] = {}
        self._cursor = store.load_cursor(CURSOR_NAME)
        self._retry_at: dict[str, datetime] = {}
        self._retry_delay: dict[str, timedelta] = {}
        for mission_id in store.mission_ids():
            self._states[mission_id] = store.snapshot(mission_id)

    # -- helpers ------------------------------------------------------------

    def _barrier(self, point: str) -> None:
        if self.crash_hook is not None:
            self.crash_hook(point)

    def _require(self, mission_id: str) -> MissionState:
        try:
            return self._states[mission_id]
        except KeyError:
            raise NotFound(mission_id) from None

    def _commit(self, mission_id: str, events: list[Event]) -> MissionState:
        state = self._states[mission_id]
        for event in events:
            self.store.append(mission_id, event)
            state = core.apply_event(state, event)
            self._states[mission_id] = state
        return state

    def mission_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._states)

    def state_of(self, mission_id: str) -> MissionState:
        with self._lock:
            return self._require(mission_id)

    # -- commands -----------------------------------------------------------

    def _new_mission_id(self, hashtag: str) -> str:
        base = hashtag.lstrip("#") or "mission"
        candidate = base
        n = 1
        while candidate in self._states:
            n += 1
            candidate = f"{base}-{n}"
        return candidate

    def create_mission(self, spec: MissionSpec,
                       kickoff_text: Optional[str] = None) -> str:
        """Open a mission and post its kickoff; returns the mission id."""
        with self._lock:
            now = self.clock.now()
            spec = core.validate_spec(spec, now)
            if kickoff_text is not None:
                if messages.nfc_length(kickoff_text) > messages.PLATFORM_LIMIT:
                    raise KickoffTooLong(
                        f"{messages.nfc_length(kickoff_text)} code points")
                validate_outbound(OutboundMessage(KICKOFF, kickoff_text),
                                  spec.hashtag)
            mission_id = self._new_mission_id(spec.hashtag)
            state, event = core.create_mission(spec, now, mission_id,
                                               kickoff_text)
            self._states[mission_id] = state
            self.store.append(mission_id, event)
            self.flush_outbox()
            return mission_id

    def submit_idea(self, mission_id: str, author: str,
                    text: str) -> MissionState:
        with self._lock:
            state = self._require(mission_id)
            events = core.submit_idea(state, author, text, self.clock.now(),
                                      self.config.bot_handle)
            return self._commit(mission_id, events)

    def cast_vote(self, mission_id: str, voter: str, idea_id: str,
                  kind: str) -> MissionState:
        with self._lock:
            state = self._require(mission_id)
            events = core.cast_vote(state, voter, idea_id, kind,
                                    self.clock.now())
            return self._commit(mission_id, events)

    def add_detail(self, mission_id: str, author: str,
                   text: str) -> MissionState:
        with self._lock:
            state = self._require(mission_id)
            events = core.add_detail(state, author, text, self.clock.now())
            return self._commit(mission_id, events)

    def subscribe(self, mission_id: str, participant: str,
                  phases: list[Phase]) -> MissionState:
        with self._lock:
            state = self._require(mission_id)
            events = core.set_subscription(state, participant, phases,
                                           self.clock.now())
            return self._commit(mission_id, events)

    def cancel(self, mission_id: str, by: str) -> MissionState:
        with self._lock:
            state = self._require(mission_id)
            events = core.cancel_mission(state, by, self.clock.now())
            return self._commit(mission_id, events)

    # -- scheduler path -------------------------------------------------------

    def tick(self) -> list[tuple[str, Event]]:
        """Apply every due transition, then send whatever posts are owed.

        Transitions across missions fire in trigger-time order (ties by
        mission id); each is persisted before any message goes out.
        """
        with self._lock:
            now = self.clock.now()
            applied = []
            while True:
                candidates: list[tuple[datetime, str, Event]] = []
                for mission_id in sorted(self._states):
                    events = core.due_transitions(
                        self._states[mission_id], now,
                        self.config.default_ideation,
                        self.config.reminder_lead)
                    if events:
                        first = events[0]
                        candidates.append(
                            (parse_ts(first.payload["trigger_time"]),
                             mission_id, first))
                if not candidates:
                    break
                candidates.sort(key=lambda item: (item[0], item[1]))
                _, mission_id, event = candidates[0]
                token = f"{mission_id}:phase:{event.payload['to_phase']}"
                self._barrier(f"pre-persist:{token}")
                self._commit(mission_id, [event])
                self._barrier(f"post-persist:{token}")
                applied.append((mission_id, event))
                # Flush between transitions so each announcement goes out
                # while its phase is current, even during catch-up.
                self.flush_outbox()
            self.flush_outbox()
            return applied

    def _pending_messages(
            self, state: MissionState) -> list[tuple[OutboundMessage, str]]:
        """Announcements owed but not yet recorded as posted.

        Derived from the log alone: the phase says which kinds are due,
        MessagePosted events say which tokens already went out.
        """
        if state.phase is Phase.CANCELLED:
            return []
        posted = state.posted_tokens()
        mission_id = state.mission_id
        pending = []
        if f"{mission_id}:kickoff" not in posted:
            if state.kickoff_text is not None:
                kickoff = OutboundMessage(KICKOFF, state.kickoff_text)
            else:
                kickoff = compose(KICKOFF, state, self.templates)[0]
            pending.append((kickoff, f"{mission_id}:kickoff"))
        progress = _PROGRESS[state.phase]
        if progress >= 1 and state.ideas:
            for prompt in compose(VOTE_PROMPT, state, self.templates):
                token = (f"{mission_id}:vote:{prompt.ref}" if prompt.ref
                         else f"{mission_id}:vote")
                if token not in posted:
                    pending.append((prompt, token))
        if progress >= 2 and f"{mission_id}:plan" not in posted:
            pending.append((compose(SELECTION_ANNOUNCEMENT, state,
                                    self.templates)[0], f"{mission_id}:plan"))
        if progress >= 3 and f"{mission_id}:go" not in posted:
            pending.append((compose(ACTION_REMINDER, state,
                                    self.templates)[0], f"{mission_id}:go"))
        return pending

    def flush_outbox(self) -> int:
        """Post pending announcements; persist-then-post with retry."""
        with self._lock:
            now = self.clock.now()
            sent = 0
            for mission_id in sorted(self._states):
                state = self._states[mission_id]
                for message, token in self._pending_messages(state):
                    if self._retry_at.get(token, now) > now:
                        continue
                    self._barrier(f"pre-post:{token}")
                    try:
                        post_id = self.transport.post(message, token)
                    except TransportDown:
                        delay = self._retry_delay.get(token,
                                                      self.config.retry_base)
                        self._retry_at[token] = now + delay
                        self._retry_delay[token] = min(delay * 2,
                                                       self.config.retry_cap)
                        continue
                    self._barrier(f"post-post:{token}")
                    state = self._commit(mission_id, [core.message_posted(
                        state, message.kind, message.text, post_id, token,
                        now, reply_to=message.reply_to)])
                    self._barrier(f"recorded:{token}")
                    self._retry_at.pop(token, None)
                    self._retry_delay.pop(token, None)
                    sent += 1
            return sent

    def next_wake(self) -> Optional[datetime]:
        with self._lock:
            plan = scheduler.plan(self._states.values(),
                                  self.config.default_ideation,
                                  self.config.reminder_lead)
            return scheduler.next_wake(plan, self.clock.now())

    # -- inbound ingest -------------------------------------------------------

    def ingest(self) -> int:
        """Drain the transport, apply what the posts mean, save the cursor.

        Reapplying a batch after a crash is harmless: votes and merges are
        idempotent and posts that already produced events are skipped by
        their source post id.
        """
        with self._lock:
            events, cursor = self.transport.drain(self._cursor)
            for event in events:
                if isinstance(event, PostObserved):
                    self._route_post(event.post)
                elif isinstance(event, EndorsementObserved):
                    self._route_endorsement(event)
            if cursor != self._cursor:
                self._cursor = cursor
                self.store.save_cursor(CURSOR_NAME, cursor)
            return len(events)

    def _mission_for_post(self, post: InboundPost) -> Optional[str]:
        candidates = []
        for mission_id, state in self._states.items():
            if messages._contains_token(post.text, state.spec.hashtag):
                candidates.append((state.phase.terminal, state.created_at,
                                   mission_id))
        if candidates:
            # Prefer live missions, then the newest.
            candidates.sort(key=lambda c: (c[0], -c[1].timestamp(), c[2]))
            return candidates[0][2]
        for ref in (post.repost_of, post.reply_to):
            if not ref:
                continue
            for mission_id, state in self._states.items():
                if ref in state.post_ideas or any(
                        m.post_id == ref for m in state.messages):
                    return mission_id
        return None

    def _route_post(self, post: InboundPost) -> None:
        mission_id = self._mission_for_post(post)
        if mission_id is None:
            return
        state = self._states[mission_id]
        if post.post_id in state.seen_posts:
            return
        known = frozenset(state.post_ideas) | frozenset(
            m.post_id for m in state.messages)
        outbound_texts = {m.post_id: m.text for m in state.messages}
        classified = classify(
            post, state, state.post_ideas, known,
            selection_post_id=selection_post_id(state),
            bot_handle=self.config.bot_handle,
            outbound_texts=outbound_texts)
        at = max(post.at, state.last_at or post.at)
        try:
            if isinstance(classified, IdeaSubmission):
                events = core.submit_idea(state, post.author,
                                          classified.display_text, at,
                                          self.config.bot_handle,
                                          source_post_id=post.post_id)
            elif isinstance(classified, VoteByRepost):
                events = core.cast_vote(state, post.author,
                                        classified.target_idea, "repost", at,
                                        source_post_id=post.post_id)
            elif isinstance(classified, DetailReply):
                events = core.add_detail(state, post.author, classified.text,
                                         at, source_post_id=post.post_id)
            else:
                return
        except core.MissionError:
            # Late or out-of-phase gestures degrade to chatter.
            return
        self._commit(mission_id, events)

    def _route_endorsement(self, endorsement: EndorsementObserved) -> None:
        for mission_id, state in self._states.items():
            idea_id = state.post_ideas.get(endorsement.post_id)
            if idea_id is None:
                continue
            at = max(endorsement.at, state.last_at or endorsement.at)
            try:
                events = core.cast_vote(state, endorsement.author, idea_id,
                                        endorsement.kind, at)
            except core.MissionError:
                return
            self._commit(mission_id, events)
            return

    def run_once(self) -> None:
        self.ingest()
        self.tick()

    # -- views ----------------------------------------------------------------

    def build_view(self, mission_id: str,
                   now: Optional[datetime] = None) -> dict:
        """Deterministic function of (state, now) backing GET /missions/{id}."""
        with self._lock:
            state = self._require(mission_id)
            now = now or self.clock.now()
            order = core.tally(state)
            by_id = {idea.idea_id: idea for idea in state.ideas}
            ideas = [
                {
                    "idea_id": idea_id,
                    "display_text": by_id[idea_id].display_text,
                    "votes": votes,
                    "rank": rank,
                }
                for rank, (idea_id, votes) in enumerate(order.items(), start=1)
            ]
            view = {
                "mission_id": mission_id,
                "name": state.spec.name,
                "rationale": state.spec.rationale,
                "hashtag": state.spec.hashtag,
                "selection_deadline": _ts(state.spec.selection_deadline),
                "execution_time": _ts(state.spec.execution_time),
                "creator": state.spec.creator,
                "created_at": _ts(state.created_at),
                "phase": state.phase.value,
                "ideas": ideas,
                "winner": state.winner,
                "details": [
                    {"author": d.author, "text": d.text, "at": _ts(d.at)}
                    for d in state.details
                ],
                "leaders": [
                    {"participant": who, "score": score}
                    for who, score in core.contributor_ranking(state)
                ],
                "timeline": self._timeline(mission_id),
            }
            if not state.phase.terminal:
                pending = core.pending_schedule(
                    state, self.config.default_ideation,
                    self.config.reminder_lead)
                remaining = (pending[0][1] - now).total_seconds()
                view["seconds_to_next_stage"] = max(0, int(remaining))
            return view

    def _timeline(self, mission_id: str) -> list[dict]:
        events = self.store.read_events(mission_id)
        groups: list[dict] = []
        current = None
        phase = Phase.IDEATION.value
        for event in events:
            if event.kind is core.EventKind.PHASE_TRANSITIONED:
                phase = event.payload["to_phase"]
                current = None
            elif event.kind is core.EventKind.MISSION_CANCELLED:
                phase = Phase.CANCELLED.value
                current = None
            if current is None or current["phase"] != phase:
                current = {"phase": phase, "events": []}
                groups.append(current)
            current["events"].append(event.to_record())
        return groups

    def list_views(self, now: Optional[datetime] = None) -> list[dict]:
        with self._lock:
            now = now or self.clock.now()
            out = []
            for mission_id in sorted(self._states):
                state = self._states[mission_id]
                entry = {
                    "mission_id": mission_id,
                    "name": state.spec.name,
                    "hashtag": state.spec.hashtag,
                    "phase": state.phase.value,
                }
                if not state.phase.terminal:
                    pending = core.pending_schedule(
                        state, self.config.default_ideation,
                        self.config.reminder_lead)
                    entry["next_trigger"] = _ts(pending[0][1])
                    remaining = (pending[0][1] - now).total_seconds()
                    entry["seconds_to_next_stage"] = max(0, int(remaining))
                out.append(entry)
            return out


def _ts(value: datetime) -> str:
    return format_ts(value)
