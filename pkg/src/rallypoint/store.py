"""Durable append-only event logs, one file per mission, plus cursors.

Each log line is a self-describing JSON record (schema version 1) with a
CRC-32 checksum over the serialized record body. A torn final line (crash
mid-append) is truncated when a writer opens the log; a bad line anywhere
else is a hard CorruptRecord. State is never stored — it is always
reconstructable by replaying the log through the core reducer.

Layout under the data directory:
    missions/<mission_id>.log      event log
    missions/<mission_id>.lock     single-writer flock
    cursors/<transport>.cur        drain cursor, written atomically
"""

from __future__ import annotations

import errno
import fcntl
import json
import os
import zlib
from datetime import timedelta
from pathlib import Path
from typing import Optional

from . import core
from .core import Event, MissionState


class StoreError(Exception):
    pass


class SequenceConflict(StoreError):
    pass


class NotFound(StoreError):
    pass


class CorruptRecord(StoreError):
    pass


class StaleCursor(StoreError):
    pass


class StorageFull(StoreError):
    pass


class LockHeld(StoreError):
    pass


def encode_record(record: dict) -> str:
    """Serialize with a crc field over the record body bytes."""
    body = json.dumps(record, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)
    crc = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    return json.dumps({**record, "crc": f"{crc:08x}"}, sort_keys=True,
                      separators=(",", ":"), ensure_ascii=False)


def decode_record(line: str) -> dict:
    """Parse and verify one log line; raises CorruptRecord."""
    try:
        loaded = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"unparseable record: {exc}") from exc
    if not isinstance(loaded, dict) or "crc" not in loaded:
        raise CorruptRecord("record missing checksum")
    stated = loaded.pop("crc")
    body = json.dumps(loaded, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)
    actual = f"{zlib.crc32(body.encode('utf-8')) & 0xFFFFFFFF:08x}"
    if stated != actual:
        raise CorruptRecord(f"checksum mismatch: {stated} != {actual}")
    return loaded


def _read_log(path: Path) -> tuple[list[dict], int]:
    """All good records plus the byte offset where a torn tail starts.

    The returned offset equals the file size when the log is clean; a
    smaller offset marks a torn final line. A bad non-final line raises.
    """
    data = path.read_bytes()
    records: list[dict] = []
    offset = 0
    pos = 0
    while pos < len(data):
        newline = data.find(b"\n", pos)
        end = newline if newline != -1 else len(data)
        line = data[pos:end].decode("utf-8", errors="replace")
        is_final = newline == -1 or end + 1 >= len(data)
        try:
            records.append(decode_record(line))
        except CorruptRecord:
            if is_final:
                return records, offset
            raise
        pos = end + 1
        offset = min(pos, len(data))
    return records, offset


class MissionLogStore:
    """Event logs and transport cursors under one data directory.

    ``durable``: fsync after every append (the default); tests that churn
    thousands of throwaway logs may turn it off — correctness of replay
    does not depend on it, only crash durability does.
    """

    def __init__(self, data_dir, durable: bool = True):
        self.root = Path(data_dir)
        self.missions_dir = self.root / "missions"
        self.cursors_dir = self.root / "cursors"
        self.missions_dir.mkdir(parents=True, exist_ok=True)
        self.cursors_dir.mkdir(parents=True, exist_ok=True)
        self.durable = durable
        self._writers: dict[str, object] = {}
        self._locks: dict[str, int] = {}
        self._last_seq: dict[str, int] = {}
        self._snapshots: dict[str, tuple[int, MissionState]] = {}

    def _log_path(self, mission_id: str) -> Path:
        return self.missions_dir / f"{mission_id}.log"

    def _acquire_lock(self, mission_id: str) -> None:
        if mission_id in self._locks:
            return
        fd = os.open(self.missions_dir / f"{mission_id}.lock",
                     os.O_CREAT | os.O_RDWR, 0o644)
        try:
            fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError as exc:
            os.close(fd)
            raise LockHeld(f"mission {mission_id} has another writer") from exc
        os.write(fd, str(os.getpid()).encode())
        self._locks[mission_id] = fd

    def _open_writer(self, mission_id: str):
        writer = self._writers.get(mission_id)
        if writer is not None:
            return writer
        self._acquire_lock(mission_id)
        path = self._log_path(mission_id)
        last_seq = 0
        if path.exists():
            records, clean_offset = _read_log(path)
            if clean_offset < path.stat().st_size:
                with open(path, "r+b") as fh:
                    fh.truncate(clean_offset)
            if records:
                last_seq = records[-1]["seq"]
        writer = open(path, "ab")
        self._writers[mission_id] = writer
        self._last_seq[mission_id] = last_seq
        return writer

    def append(self, mission_id: str, event: Event) -> None:
        """Durably append one event; enforces contiguous seq numbers."""
        writer = self._open_writer(mission_id)
        expected = self._last_seq[mission_id] + 1
        if event.seq != expected:
            raise SequenceConflict(
                f"mission {mission_id}: expected seq {expected}, "
                f"got {event.seq}")
        line = encode_record(event.to_record()) + "\n"
        try:
            writer.write(line.encode("utf-8"))
            writer.flush()
            if self.durable:
                os.fsync(writer.fileno())
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull(str(exc)) from exc
            raise
        self._last_seq[mission_id] = event.seq
        cached = self._snapshots.get(mission_id)
        if cached is not None and cached[0] == event.seq - 1:
            self._snapshots[mission_id] = (
                event.seq, core.apply_event(cached[1], event))
        else:
            self._snapshots.pop(mission_id, None)

    def read_events(self, mission_id: str) -> list[Event]:
        path = self._log_path(mission_id)
        if not path.exists():
            raise NotFound(mission_id)
        records, _ = _read_log(path)
        if not records:
            raise NotFound(mission_id)
        return [Event.from_record(r) for r in records]

    def replay(self, mission_id: str) -> MissionState:
        """Reconstruct state by folding the log through the core reducer."""
        return core.replay(self.read_events(mission_id))

    def snapshot(self, mission_id: str) -> MissionState:
        """Replay with an in-memory cache; purely an optimization."""
        cached = self._snapshots.get(mission_id)
        if cached is not None:
            return cached[1]
        state = self.replay(mission_id)
        self._snapshots[mission_id] = (state.last_seq, state)
        return state

    def mission_ids(self) -> list[str]:
        return sorted(p.stem for p in self.missions_dir.glob("*.log"))

    def list_missions(
        self,
        default_ideation: timedelta = core.DEFAULT_IDEATION,
        reminder_lead: timedelta = core.DEFAULT_REMINDER_LEAD,
    ) -> list[tuple]:
        """(mission_id, phase, next_trigger) per stored mission."""
        listing = []
        for mission_id in self.mission_ids():
            state = self.snapshot(mission_id)
            pending = core.pending_schedule(state, default_ideation,
                                            reminder_lead)
            next_trigger = pending[0][1] if pending else None
            listing.append((mission_id, state.phase, next_trigger))
        return listing

    def save_cursor(self, name: str, cursor: str) -> None:
        """Atomic write via temp file + rename."""
        path = self.cursors_dir / f"{name}.cur"
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(cursor)
            fh.flush()
            if self.durable:
                os.fsync(fh.fileno())
        os.replace(tmp, path)

    def load_cursor(self, name: str) -> Optional[str]:
        path = self.cursors_dir / f"{name}.cur"
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8")

    def close(self) -> None:
        for writer in self._writers.values():
            writer.close()
        self._writers.clear()
        for fd in self._locks.values():
            fcntl.flock(fd, fcntl.LOCK_UN)
            os.close(fd)
        self._locks.clear()
