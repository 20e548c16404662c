"""Outbound message composition and inbound post classification.

Outbound announcements are rendered from a template file, carry the
mission hashtag exactly once plus a per-kind marker token ("idea:",
"vote:", "plan:", "go:"), and always fit the platform limit of 140 NFC
code points; user-sourced fragments are scrubbed and truncated to make
that hold for every valid mission spec.

Inbound classification is structural: repost targets, reply targets, and
the current phase decide whether a post is an idea, a vote, a detail, or
chatter. Nobody has to type markers.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Mapping, Optional

import regex

from .canonical import (
    PHASE_MARKERS,
    PLATFORM_LIMIT,
    canonicalize,
    nfc_length,
    token_pattern,
    truncate_to_limit,
)
from .core import MissionState, Phase
from .timeutil import format_ts, parse_ts

KICKOFF = "Kickoff"
VOTE_PROMPT = "VotePrompt"
SELECTION_ANNOUNCEMENT = "SelectionAnnouncement"
ACTION_REMINDER = "ActionReminder"

MESSAGE_KINDS = (KICKOFF, VOTE_PROMPT, SELECTION_ANNOUNCEMENT, ACTION_REMINDER)

MARKER_FOR_KIND = {
    KICKOFF: "idea:",
    VOTE_PROMPT: "vote:",
    SELECTION_ANNOUNCEMENT: "plan:",
    ACTION_REMINDER: "go:",
}

_TEMPLATE_KEYS = {
    KICKOFF: "kickoff",
    VOTE_PROMPT: "vote_prompt",
    SELECTION_ANNOUNCEMENT: "selection_announcement",
    ACTION_REMINDER: "action_reminder",
}

VOTE_PROMPT_IDEAS = 3


class UnroutablePost(Exception):
    """The transport handed over a post with no tie to this mission."""


class UncomposableMessage(Exception):
    """Mandatory template tokens alone exceed the platform limit."""


@dataclass(frozen=True)
class InboundPost:
    post_id: str
    author: str
    text: str
    at: datetime
    repost_of: Optional[str] = None
    reply_to: Optional[str] = None

    def to_payload(self) -> dict:
        out = {
            "post_id": self.post_id,
            "author": self.author,
            "text": self.text,
            "at": format_ts(self.at),
        }
        if self.repost_of:
            out["repost_of"] = self.repost_of
        if self.reply_to:
            out["reply_to"] = self.reply_to
        return out

    @classmethod
    def from_payload(cls, payload: dict) -> "InboundPost":
        return cls(
            post_id=payload["post_id"],
            author=payload["author"],
            text=payload["text"],
            at=parse_ts(payload["at"]),
            repost_of=payload.get("repost_of"),
            reply_to=payload.get("reply_to"),
        )


@dataclass(frozen=True)
class OutboundMessage:
    kind: str
    text: str
    reply_to: Optional[str] = None
    ref: Optional[str] = None  # idea_id for fanned-out vote prompts


# Classification results -----------------------------------------------------

@dataclass(frozen=True)
class IdeaSubmission:
    canonical_key: str
    display_text: str


@dataclass(frozen=True)
class VoteByRepost:
    target_idea: str


@dataclass(frozen=True)
class DetailReply:
    text: str


@dataclass(frozen=True)
class Chatter:
    pass


_RT_PREFIX = regex.compile(r"^\s*rt\s+@\w+:?\s*", regex.IGNORECASE)


def strip_repost_prefixes(text: str) -> str:
    while True:
        stripped = _RT_PREFIX.sub("", text, count=1)
        if stripped == text:
            return text.strip()
        text = stripped


def _contains_token(text: str, token: str) -> bool:
    return token_pattern(token).search(text) is not None


def classify(
    post: InboundPost,
    state: MissionState,
    post_ideas: Mapping[str, str],
    known_posts: frozenset,
    selection_post_id: Optional[str] = None,
    bot_handle: str = "",
    outbound_texts: Optional[Mapping[str, str]] = None,
):
    """Decide what a routed post means for this mission.

    ``post_ideas`` maps idea-bearing post ids to idea ids; ``known_posts``
    is every post id tied to the mission (inbound and outbound). A repost
    of an idea post is a vote unless its residual text is a genuinely new
    key; anything unclassifiable is Chatter.
    """
    routed = (
        _contains_token(post.text, state.spec.hashtag)
        or (post.repost_of and post.repost_of in known_posts)
        or (post.reply_to and post.reply_to in known_posts)
    )
    if not routed:
        raise UnroutablePost(post.post_id)

    hashtag = state.spec.hashtag
    text = post.text

    if post.repost_of and post.repost_of in post_ideas:
        key = canonicalize(text, hashtag, bot_handle)
        existing = {idea.canonical_key for idea in state.ideas}
        if key and key not in existing and state.phase in (
                Phase.IDEATION, Phase.VOTING):
            return IdeaSubmission(key, strip_repost_prefixes(text))
        return VoteByRepost(post_ideas[post.repost_of])

    if post.repost_of and outbound_texts and post.repost_of in outbound_texts:
        # Quoting a bot post: only text beyond the quoted announcement counts.
        text = text.replace(outbound_texts[post.repost_of], " ", 1)

    if state.phase in (Phase.IDEATION, Phase.VOTING):
        key = canonicalize(text, hashtag, bot_handle)
        if key:
            return IdeaSubmission(key, strip_repost_prefixes(text))
        return Chatter()

    if state.phase in (Phase.PLANNING, Phase.ACTION_PENDING):
        if selection_post_id and post.reply_to == selection_post_id:
            return DetailReply(post.text)

    return Chatter()


# Composition -----------------------------------------------------------------

def load_templates(path: Optional[str] = None) -> dict:
    """Read ``kind = template`` lines; defaults ship with the package."""
    if path is None:
        from importlib.resources import files
        raw = files("rallypoint").joinpath("templates.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    by_key = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, template = line.partition("=")
        by_key[key.strip()] = template.strip()
    templates = {}
    for kind, key in _TEMPLATE_KEYS.items():
        if key not in by_key:
            raise ValueError(f"template file missing {key!r}")
        templates[kind] = by_key[key]
    return templates


_DEFAULT_TEMPLATES: Optional[dict] = None


def default_templates() -> dict:
    global _DEFAULT_TEMPLATES
    if _DEFAULT_TEMPLATES is None:
        _DEFAULT_TEMPLATES = load_templates()
    return _DEFAULT_TEMPLATES


def scrub_for_embed(text: str, hashtag: str) -> str:
    """Clean user text before embedding it in an announcement.

    Drops hashtag occurrences and marker tokens so the invariants (one
    hashtag, one marker) survive arbitrary user input; keeps case and
    punctuation otherwise.
    """
    for token in (hashtag, *PHASE_MARKERS):
        text = token_pattern(token).sub(" ", text)
    return " ".join(text.split())


def _human_time(ts: datetime) -> str:
    return ts.strftime("%Y-%m-%d %H:%M UTC")


def _render(template: str, fields: dict, variable: str, value: str) -> str:
    filled = template.format(**{**fields, variable: value})
    return " ".join(filled.split())


def _fit(template: str, fields: dict, variable: str, value: str,
         limit: int = PLATFORM_LIMIT) -> str:
    """Render, shrinking the variable field until the limit holds."""
    text = _render(template, fields, variable, value)
    if nfc_length(text) <= limit:
        return text
    budget = limit - nfc_length(_render(template, fields, variable, ""))
    while budget > 0:
        text = _render(template, fields, variable,
                       truncate_to_limit(value, budget))
        if nfc_length(text) <= limit:
            return text
        budget -= 1
    text = _render(template, fields, variable, "")
    if nfc_length(text) > limit:
        raise UncomposableMessage(
            f"mandatory tokens alone exceed {limit} code points")
    return text


def compose(kind: str, state: MissionState,
            templates: Optional[dict] = None) -> list[OutboundMessage]:
    """Build the announcement(s) of ``kind`` for the mission's state.

    Returns one message for every kind except VotePrompt, which falls back
    to one message per idea when the combined prompt cannot fit. Every
    returned text is at most 140 NFC code points, mentions the hashtag
    exactly once, and carries the kind's marker.
    """
    templates = templates or default_templates()
    spec = state.spec
    fields = {
        "name": scrub_for_embed(spec.name, spec.hashtag),
        "rationale": scrub_for_embed(spec.rationale, spec.hashtag),
        "hashtag": spec.hashtag,
        "deadline": _human_time(spec.selection_deadline),
        "when": _human_time(spec.execution_time),
        "idea": "",
    }
    template = templates[kind]

    if kind == KICKOFF:
        text = _fit(template, fields, "rationale", fields["rationale"])
        return [OutboundMessage(KICKOFF, text)]

    if kind == VOTE_PROMPT:
        from .core import tally
        order = list(tally(state))
        top = [state.idea_by_id(i) for i in order[:VOTE_PROMPT_IDEAS]]
        if not top:
            return []
        listed = " ".join(
            f"{n}) {scrub_for_embed(idea.display_text, spec.hashtag)}"
            for n, idea in enumerate(top, start=1))
        combined = _render(template, fields, "idea", listed)
        if nfc_length(combined) <= PLATFORM_LIMIT:
            return [OutboundMessage(VOTE_PROMPT, combined)]
        return [
            OutboundMessage(
                VOTE_PROMPT,
                _fit(template, fields, "idea",
                     scrub_for_embed(idea.display_text, spec.hashtag)),
                ref=idea.idea_id,
            )
            for idea in top
        ]

    if kind == SELECTION_ANNOUNCEMENT:
        if state.winner is None:
            raise ValueError("no winner selected")
        winner = state.idea_by_id(state.winner)
        text = _fit(template, fields, "idea",
                    scrub_for_embed(winner.display_text, spec.hashtag))
        return [OutboundMessage(SELECTION_ANNOUNCEMENT, text)]

    if kind == ACTION_REMINDER:
        if state.winner is None:
            raise ValueError("no winner selected")
        winner = state.idea_by_id(state.winner)
        text = _fit(template, fields, "idea",
                    scrub_for_embed(winner.display_text, spec.hashtag))
        return [OutboundMessage(ACTION_REMINDER, text)]

    raise ValueError(f"unknown message kind {kind!r}")


def validate_outbound(message: OutboundMessage, hashtag: str) -> None:
    """Assert the three OutboundMessage invariants; raises ValueError."""
    if nfc_length(message.text) > PLATFORM_LIMIT:
        raise ValueError(f"message over {PLATFORM_LIMIT} code points")
    tag_hits = token_pattern(hashtag).findall(message.text)
    if len(tag_hits) != 1:
        raise ValueError(f"hashtag must appear exactly once, saw {len(tag_hits)}")
    own = MARKER_FOR_KIND[message.kind]
    for marker in MARKER_FOR_KIND.values():
        count = len(token_pattern(marker).findall(message.text))
        expected = 1 if marker == own else 0
        if count != expected:
            raise ValueError(
                f"{message.kind} must carry {own!r} once and no other "
                f"markers; found {marker!r} x{count}")
