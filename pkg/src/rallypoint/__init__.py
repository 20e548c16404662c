"""Participatory collective-action missions over a microblog-style feed.

Event-sourced mission state machine (ideation, voting, planning, action),
hashtag message canonicalization and vote merging, deadline scheduling,
a deterministic simulated feed, durable append-only logs, and an HTTP API.
"""

__version__ = "0.1.0"
