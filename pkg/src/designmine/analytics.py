"""Session event logs and the dwell-based exploration report.

The report is a pure fold over the event log: replaying the same events
always yields the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import EventOrderError

EVENT_KINDS = ("view_post", "view_comment", "filter_change", "note_add", "jump")
_VIEW_KINDS = {"view_post": "post", "view_comment": "comment"}

DEFAULT_DWELL_THRESHOLD_MS = 5000


@dataclass(frozen=True)
class SessionEvent:
    session_id: str
    timestamp: int  # unix milliseconds
    kind: str
    subject_id: str
    detail: dict | None = None

    @classmethod
    def from_payload(cls, session_id: str, payload: dict) -> "SessionEvent":
        kind = payload.get("kind")
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        ts = payload.get("timestamp")
        if not isinstance(ts, int) or ts < 0:
            raise ValueError("timestamp must be a non-negative integer (unix ms)")
        subject = payload.get("subject_id")
        if not subject or not isinstance(subject, str):
            raise ValueError("subject_id required")
        return cls(
            session_id=session_id,
            timestamp=ts,
            kind=kind,
            subject_id=subject,
            detail=payload.get("detail"),
        )


@dataclass
class SubjectDwell:
    subject_id: str
    subject_kind: str  # "post" | "comment"
    total_ms: int = 0
    max_continuous_ms: int = 0

    def explored(self, threshold_ms: int) -> bool:
        return self.max_continuous_ms > threshold_ms


@dataclass
class ExplorationReport:
    session_id: str
    threshold_ms: int
    posts_explored: int
    comments_explored: int
    dwell_by_subject: dict[str, SubjectDwell] = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "threshold_ms": self.threshold_ms,
            "posts_explored": self.posts_explored,
            "comments_explored": self.comments_explored,
            "subjects": [
                {
                    "subject_id": d.subject_id,
                    "subject_kind": d.subject_kind,
                    "total_ms": d.total_ms,
                    "max_continuous_ms": d.max_continuous_ms,
                    "explored": d.explored(self.threshold_ms),
                }
                for _, d in sorted(self.dwell_by_subject.items())
            ],
        }


def validate_order(events: Iterable[SessionEvent], last_timestamp: int | None = None) -> None:
    """Timestamps must be non-decreasing, also w.r.t. previously stored events."""
    prev = last_timestamp
    for ev in events:
        if prev is not None and ev.timestamp < prev:
            raise EventOrderError(
                f"event at {ev.timestamp} ms is earlier than predecessor at {prev} ms"
            )
        prev = ev.timestamp


def exploration_report(
    session_id: str,
    events: Iterable[SessionEvent],
    threshold_ms: int = DEFAULT_DWELL_THRESHOLD_MS,
) -> ExplorationReport:
    """Dwell accounting over one session's ordered events.

    Focus is the subject of the latest view event; it ends when a view of
    a *different* subject arrives (filter changes, note ops, and jumps do
    not end it). A subject counts as explored when any single continuous
    dwell exceeds the threshold; each unique subject counts at most once.
    The final open interval contributes nothing (its end is unknown).
    """
    events = list(events)
    validate_order(events)
    dwell: dict[tuple[str, str], SubjectDwell] = {}
    current: tuple[str, str, int] | None = None  # (subject, kind, since)

    def close(until: int) -> None:
        nonlocal current
        if current is None:
            return
        subject, kind, since = current
        entry = dwell.setdefault(
            (kind, subject), SubjectDwell(subject_id=subject, subject_kind=kind)
        )
        span = until - since
        entry.total_ms += span
        entry.max_continuous_ms = max(entry.max_continuous_ms, span)
        current = None

    for ev in events:
        view_kind = _VIEW_KINDS.get(ev.kind)
        if view_kind is None:
            continue
        if current is not None and (current[0] != ev.subject_id or current[1] != view_kind):
            close(ev.timestamp)
        if current is None:
            current = (ev.subject_id, view_kind, ev.timestamp)
    # Open interval at the end of the log is dropped: no known endpoint.

    posts = sum(
        1 for d in dwell.values() if d.subject_kind == "post" and d.explored(threshold_ms)
    )
    comments = sum(
        1 for d in dwell.values() if d.subject_kind == "comment" and d.explored(threshold_ms)
    )
    return ExplorationReport(
        session_id=session_id,
        threshold_ms=threshold_ms,
        posts_explored=posts,
        comments_explored=comments,
        dwell_by_subject={f"{kind}:{sid}": d for (kind, sid), d in dwell.items()},
    )
