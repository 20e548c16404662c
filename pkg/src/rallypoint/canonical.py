"""Text canonicalization and length rules for feed messages.

Canonical keys are what merge duplicate idea submissions and modified
reposts: two texts with the same key are the same idea. The pipeline is
deliberately strict and deterministic — no fuzzy matching.

Message length is counted in NFC-normalized code points against the
platform limit of 140; truncation never splits a grapheme cluster.
"""

from __future__ import annotations

import unicodedata

import regex

PLATFORM_LIMIT = 140
ELLIPSIS = "…"

# Marker tokens that tag each outbound message kind; stripped from user text
# so that quoting a bot message never pollutes a canonical key.
PHASE_MARKERS = ("idea:", "vote:", "plan:", "go:")

_REPOST_PREFIX = regex.compile(r"^\s*rt\s+@\w+:?\s*", regex.IGNORECASE)
_GRAPHEME = regex.compile(r"\X")


def token_pattern(token: str):
    """Case-insensitive pattern for a whole token.

    Bounded on the right so "#park" never eats the front of "#parkday",
    and on the left for word-initial tokens so "go:" never matches inside
    "logo:". Tokens starting with '#' or '@' carry their own left edge.
    """
    left = r"(?<![\w])" if token[:1].isalnum() else ""
    return regex.compile(left + regex.escape(token) + r"(?![\w])",
                         regex.IGNORECASE)


def _delete_token(text: str, token: str) -> str:
    return token_pattern(token).sub(" ", text)


def canonicalize(text: str, mission_hashtag: str = "", bot_handle: str = "") -> str:
    """Reduce a post's text to its canonical idea key (may be empty).

    Applied in order: strip leading "RT @handle:" prefixes; delete the
    mission hashtag, phase-marker tokens, and bot-handle mentions; NFC
    normalize and case-fold; replace non letter/digit/space characters
    with spaces; collapse whitespace. The result is a fixed point of this
    function.
    """
    while True:
        stripped = _REPOST_PREFIX.sub("", text, count=1)
        if stripped == text:
            break
        text = stripped
    for token in PHASE_MARKERS:
        text = _delete_token(text, token)
    if mission_hashtag:
        text = _delete_token(text, mission_hashtag)
    if bot_handle:
        text = _delete_token(text, bot_handle)
    text = unicodedata.normalize("NFC", text).casefold()
    text = "".join(
        ch if (ch.isspace() or unicodedata.category(ch)[0] == "L"
               or unicodedata.category(ch) == "Nd")
        else " "
        for ch in text
    )
    return " ".join(text.split())


def nfc_length(text: str) -> int:
    """Code-point count of the NFC normalization of ``text``."""
    return len(unicodedata.normalize("NFC", text))


def graphemes(text: str) -> list[str]:
    """Split into extended grapheme clusters."""
    return _GRAPHEME.findall(text)


def truncate_to_limit(text: str, limit: int = PLATFORM_LIMIT) -> str:
    """Cut ``text`` to at most ``limit`` NFC code points.

    Unchanged when it already fits; otherwise cut to ``limit - 1`` code
    points, backing off to the previous grapheme-cluster boundary, and
    append a single ellipsis. With ``limit`` 1 only the ellipsis remains.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    text = unicodedata.normalize("NFC", text)
    if len(text) <= limit:
        return text
    budget = limit - 1
    kept: list[str] = []
    used = 0
    for cluster in graphemes(text):
        if used + len(cluster) > budget:
            break
        kept.append(cluster)
        used += len(cluster)
    return "".join(kept) + ELLIPSIS
