"""Historical event annotations for report overlays."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class Event:
    label: str
    category: str
    start: str
    end: str | None = None

    def __post_init__(self):
        if self.end is not None and self.end < self.start:
            raise ValueError(f"event {self.label!r}: end {self.end} precedes start {self.start}")

    def overlaps(self, first: str, last: str) -> bool:
        return self.start <= last and (self.end or self.start) >= first


def load_events(path: str | Path | None = None) -> list[Event]:
    """Read ``label,category,start,end`` rows; the bundled list when ``path`` is None."""
    if path is None:
        text = resources.files("tvefficiency.data").joinpath("events.csv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    rows = csv.DictReader(text.splitlines())
    return [Event(r["label"], r["category"], r["start"], r["end"] or None) for r in rows]


def overlay(events: list[Event], dates: tuple[str, ...], phi_by_date: dict[str, float] | None = None) -> list[dict]:
    """Events that intersect ``[dates[0], dates[-1]]``, with the multiplier at their start."""
    if not dates:
        return []
    first, last = dates[0], dates[-1]
    phi_by_date = phi_by_date or {}
    out = []
    for ev in events:
        if not ev.overlaps(first, last):
            continue
        out.append(
            {
                "label": ev.label,
                "category": ev.category,
                "start": ev.start,
                "end": ev.end,
                "phi_at_start": phi_by_date.get(ev.start),
            }
        )
    return out
