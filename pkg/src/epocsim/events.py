"""Artifact event records shared by the synthesizer and the detectors."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class ArtifactKind(enum.Enum):
    OCULAR = "ocular"
    MUSCLE = "muscle"
    DISCONNECTION = "disconnection"


@dataclass(frozen=True)
class ArtifactEvent:
    """A time interval on a set of channels, either injected or detected.

    ``score`` is a detector-specific strength measure (0 for injected
    ground-truth events).
    """

    kind: ArtifactKind
    t_start: float
    t_end: float
    channels: frozenset[str]
    score: float = 0.0

    def __post_init__(self) -> None:
        if not self.t_start < self.t_end:
            raise ValueError(f"event must have t_start < t_end, got [{self.t_start}, {self.t_end}]")
        if not self.channels:
            raise ValueError("event must name at least one channel")

    def overlaps(self, other: "ArtifactEvent") -> bool:
        return self.t_start < other.t_end and other.t_start < self.t_end


def events_to_csv(events: list[ArtifactEvent]) -> str:
    """Render events as CSV with a ``kind,t_start,t_end,channels,score`` header.

    The channels field joins labels with ``|`` so the row stays one CSV record.
    """
    lines = ["kind,t_start,t_end,channels,score"]
    for ev in events:
        chans = "|".join(sorted(ev.channels))
        lines.append(f"{ev.kind.value},{ev.t_start:.6g},{ev.t_end:.6g},{chans},{ev.score:.6g}")
    return "\n".join(lines) + "\n"


def events_from_csv(text: str) -> list[ArtifactEvent]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "kind,t_start,t_end,channels,score":
        raise ValueError("missing event CSV header 'kind,t_start,t_end,channels,score'")
    events = []
    for ln in lines[1:]:
        kind, t0, t1, chans, score = ln.split(",")
        events.append(
            ArtifactEvent(
                kind=ArtifactKind(kind),
                t_start=float(t0),
                t_end=float(t1),
                channels=frozenset(chans.split("|")),
                score=float(score),
            )
        )
    return events
