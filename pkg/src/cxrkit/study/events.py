"""Append-only event log: the study's single source of truth."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

EVENT_KINDS = ("assigned", "report_submitted", "feedback_submitted")


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class StudyEvent:
    kind: str
    session_id: str
    case_id: str
    payload: dict
    ts: str

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "session_id": self.session_id,
            "case_id": self.case_id,
            "payload": self.payload,
            "ts": self.ts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StudyEvent":
        return cls(kind=d["kind"], session_id=d["session_id"], case_id=d["case_id"],
                   payload=dict(d["payload"]), ts=d["ts"])


@dataclass
class EventLog:
    path: Path | None = None
    events: list = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def append(self, event: StudyEvent) -> None:
        with self._lock:
            self.events.append(event)
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(event.to_dict(), sort_keys=True) + "\n")

    def snapshot(self) -> list:
        with self._lock:
            return list(self.events)

    @classmethod
    def load(cls, path) -> "EventLog":
        log = cls(path=Path(path))
        if log.path.exists():
            with open(log.path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        log.events.append(StudyEvent.from_dict(json.loads(line)))
        return log
