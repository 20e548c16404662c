"""Pluggable boundary to the social feed.

The engine only ever talks to a ``Transport``: post outbound messages
(idempotent per dedup token) and drain observed inbound events through a
durable cursor. ``SimulatedFeed`` is the deterministic reference
implementation used by scenarios and tests; ``WebhookTransport`` bridges
the same contract to HTTP (inbound records POSTed to ``/inbound``,
outbound posts delivered by POSTing records to a configured URL).

Transport records share the self-describing envelope of the event log:
``{"v": 1, "kind": ..., "payload": {...}}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Optional, Protocol, Union

from .canonical import PLATFORM_LIMIT, nfc_length
from .messages import InboundPost, OutboundMessage
from .timeutil import format_ts, parse_ts


class TransportDown(Exception):
    """Retryable delivery failure."""


class RejectedTooLong(Exception):
    """Length-invariant violation upstream; must never happen in tests."""


class StaleCursor(Exception):
    pass


@dataclass(frozen=True)
class PostObserved:
    post: InboundPost

    def to_record(self) -> dict:
        return {"v": 1, "kind": "PostObserved", "payload": self.post.to_payload()}


@dataclass(frozen=True)
class EndorsementObserved:
    post_id: str
    author: str
    kind: str  # repost | favorite
    at: datetime

    def to_record(self) -> dict:
        return {
            "v": 1,
            "kind": "EndorsementObserved",
            "payload": {
                "post_id": self.post_id,
                "author": self.author,
                "kind": self.kind,
                "at": format_ts(self.at),
            },
        }


TransportEvent = Union[PostObserved, EndorsementObserved]


def event_from_record(record: dict) -> TransportEvent:
    kind = record.get("kind")
    payload = record.get("payload", {})
    if kind == "PostObserved":
        return PostObserved(InboundPost.from_payload(payload))
    if kind == "EndorsementObserved":
        if payload["kind"] not in ("repost", "favorite"):
            raise ValueError(f"bad endorsement kind {payload['kind']!r}")
        return EndorsementObserved(
            post_id=payload["post_id"],
            author=payload["author"],
            kind=payload["kind"],
            at=parse_ts(payload["at"]),
        )
    raise ValueError(f"unknown transport record kind {kind!r}")


class Transport(Protocol):
    def post(self, message: OutboundMessage, dedup_token: str) -> str: ...

    def drain(self, cursor: Optional[str]) -> tuple[list[TransportEvent], str]: ...


@dataclass(frozen=True)
class FeedPost:
    post_id: str
    kind: str
    text: str
    dedup_token: str
    reply_to: Optional[str] = None


class SimulatedFeed:
    """Deterministic in-memory feed; retains everything.

    Post ids are sequential, so identical scenario runs produce identical
    feeds. ``down`` simulates an outage window for outbound posting.
    """

    def __init__(self):
        self.posts: list[FeedPost] = []
        self.events: list[TransportEvent] = []
        self._by_token: dict[str, str] = {}
        self.down = False

    def post(self, message: OutboundMessage, dedup_token: str) -> str:
        if self.down:
            raise TransportDown("simulated outage")
        if dedup_token in self._by_token:
            return self._by_token[dedup_token]
        if nfc_length(message.text) > PLATFORM_LIMIT:
            raise RejectedTooLong(f"{nfc_length(message.text)} code points")
        post_id = f"f{len(self.posts) + 1:04d}"
        self.posts.append(FeedPost(post_id, message.kind, message.text,
                                   dedup_token, message.reply_to))
        self._by_token[dedup_token] = post_id
        return post_id

    def inject(self, event: TransportEvent) -> None:
        self.events.append(event)

    def drain(self, cursor: Optional[str]) -> tuple[list[TransportEvent], str]:
        start = 0
        if cursor:
            try:
                start = int(cursor)
            except ValueError as exc:
                raise StaleCursor(cursor) from exc
            if start > len(self.events):
                raise StaleCursor(cursor)
        batch = list(self.events[start:])
        return batch, str(len(self.events))

    def outbound_kinds(self) -> list[str]:
        return [p.kind for p in self.posts]


class WebhookTransport:
    """Same contract over HTTP-shaped records.

    ``deliver`` is called with one outbound record per post; in production
    it POSTs to the configured URL, in tests it is a plain callable.
    Inbound records handed to ``receive`` (wired to POST /inbound) join
    the drain queue in arrival order.
    """

    def __init__(self, deliver: Callable[[dict], None]):
        self._deliver = deliver
        self.events: list[TransportEvent] = []
        self._by_token: dict[str, str] = {}

    def receive(self, record: dict) -> None:
        self.events.append(event_from_record(record))

    def post(self, message: OutboundMessage, dedup_token: str) -> str:
        if dedup_token in self._by_token:
            return self._by_token[dedup_token]
        if nfc_length(message.text) > PLATFORM_LIMIT:
            raise RejectedTooLong(f"{nfc_length(message.text)} code points")
        post_id = f"w{len(self._by_token) + 1:04d}"
        record = {
            "v": 1,
            "kind": "OutboundPost",
            "payload": {
                "post_id": post_id,
                "message_kind": message.kind,
                "text": message.text,
                "dedup_token": dedup_token,
                "reply_to": message.reply_to,
            },
        }
        try:
            self._deliver(record)
        except Exception as exc:
            raise TransportDown(str(exc)) from exc
        self._by_token[dedup_token] = post_id
        return post_id

    def drain(self, cursor: Optional[str]) -> tuple[list[TransportEvent], str]:
        start = 0
        if cursor:
            try:
                start = int(cursor)
            except ValueError as exc:
                raise StaleCursor(cursor) from exc
            if start > len(self.events):
                raise StaleCursor(cursor)
        batch = list(self.events[start:])
        return batch, str(len(self.events))
