"""Axis-aligned boxes in normalized integer coordinates [0, 100].

A box covers the half-open integer lattice [x1, x2) x [y1, y2), so its area
is (x2 - x1) * (y2 - y1) and two boxes sharing only an edge do not intersect.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

DEFAULT_MAP_THRESHOLDS = (0.1, 0.2, 0.3, 0.4, 0.5)

_BOX_PATTERN = re.compile(
    r"\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]"
)


@dataclass(frozen=True)
class Box:
    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        for v in (self.x1, self.y1, self.x2, self.y2):
            if not isinstance(v, int) or not 0 <= v <= 100:
                raise ValueError(f"box coordinate {v!r} outside [0, 100]")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"degenerate box ({self.x1},{self.y1},{self.x2},{self.y2})")

    @property
    def area(self) -> int:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def as_text(self) -> str:
        return f"[{self.x1},{self.y1},{self.x2},{self.y2}]"


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


def map_at_thresholds(ious, thresholds=DEFAULT_MAP_THRESHOLDS) -> float:
    """Mean detection rate over IOU thresholds: mean over t of frac(iou >= t)."""
    ious = list(ious)
    if not ious:
        raise ValueError("map_at_thresholds: empty iou list")
    for v in ious:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"iou {v} outside [0, 1]")
    rates = [sum(1 for v in ious if v >= t) / len(ious) for t in thresholds]
    return sum(rates) / len(rates)


def parse_box(text: str):
    """Parse the first "[x1,y1,x2,y2]" pattern in text into a Box.

    Values are clamped to [0, 100]; returns None when no pattern is found or
    the clamped coordinates are not properly ordered.
    """
    m = _BOX_PATTERN.search(text)
    if m is None:
        return None
    x1, y1, x2, y2 = (max(0, min(100, int(g))) for g in m.groups())
    if x1 >= x2 or y1 >= y2:
        return None
    return Box(x1, y1, x2, y2)
