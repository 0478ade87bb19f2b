"""Coordinate conventions and the four-position corner-anchored label model.

Screen space is y-down: the origin is the top-left corner of the viewport
and all positions are real-valued pixels.  Every label is an axis-aligned
rectangle of uniform size that touches its feature point at exactly one of
the rectangle's four corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum


class Corner(IntEnum):
    """Label anchor corners, ordered by cartographic preference.

    The name describes where the label body sits relative to the feature:
    UR extends up-and-right (the rect's bottom-left corner is the feature),
    LR down-and-right, UL up-and-left, LL down-and-left.
    """

    UR = 0
    LR = 1
    UL = 2
    LL = 3


#: Corners from most to least preferred.
PREFERENCE_ORDER: tuple[Corner, ...] = (Corner.UR, Corner.LR, Corner.UL, Corner.LL)


@dataclass(frozen=True, slots=True)
class ScreenPoint:
    """A position in screen pixels (y grows downward)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"screen point must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True, slots=True)
class Feature:
    """An input point to be labeled.

    Larger priority means more important; ids must be unique within a
    dataset.
    """

    id: int
    position: ScreenPoint
    priority: float
    text: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.priority):
            raise ValueError(f"feature {self.id}: priority must be finite")


@dataclass(frozen=True, slots=True)
class LabelDims:
    """Uniform label size in pixels (must be positive)."""

    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"label dims must be positive, got {self.width}x{self.height}")
        if not (math.isfinite(self.width) and math.isfinite(self.height)):
            raise ValueError("label dims must be finite")


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned rectangle; left < right and top < bottom (y-down)."""

    left: float
    top: float
    right: float
    bottom: float

    def __post_init__(self) -> None:
        if not (self.left < self.right and self.top < self.bottom):
            raise ValueError(
                f"degenerate rect ({self.left}, {self.top}, {self.right}, {self.bottom})"
            )

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def height(self) -> float:
        return self.bottom - self.top

    def contains_strictly(self, x: float, y: float) -> bool:
        """True iff (x, y) lies strictly inside this rect (boundary excluded)."""
        return self.left < x < self.right and self.top < y < self.bottom


@dataclass(frozen=True, slots=True)
class Viewport:
    """Screen extent plus an affine world-to-screen transform.

    ``screen = (world - offset) * scale``.  The identity viewport (offset 0,
    scale 1) treats input coordinates as already being screen pixels.
    """

    width: float
    height: float
    offset_x: float = 0.0
    offset_y: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"viewport must have positive extent, got {self.width}x{self.height}")
        if not self.scale > 0:
            raise ValueError(f"viewport scale must be positive, got {self.scale}")

    @property
    def is_identity(self) -> bool:
        return self.offset_x == 0.0 and self.offset_y == 0.0 and self.scale == 1.0

    def project(self, x: float, y: float) -> tuple[float, float]:
        """World coordinates to screen pixels."""
        return ((x - self.offset_x) * self.scale, (y - self.offset_y) * self.scale)

    def unproject(self, sx: float, sy: float) -> tuple[float, float]:
        """Screen pixels back to world coordinates (inverse of project)."""
        return (sx / self.scale + self.offset_x, sy / self.scale + self.offset_y)


def candidate_rect(p: ScreenPoint, dims: LabelDims, c: Corner) -> Rect:
    """The label rectangle anchored so that ``p`` sits at the given corner.

    UR places the label above-right of the point (the rect's bottom-left
    corner equals ``p``), LR below-right, UL above-left, LL below-left.
    """
    w, h = dims.width, dims.height
    if c == Corner.UR:
        return Rect(p.x, p.y - h, p.x + w, p.y)
    if c == Corner.LR:
        return Rect(p.x, p.y, p.x + w, p.y + h)
    if c == Corner.UL:
        return Rect(p.x - w, p.y - h, p.x, p.y)
    return Rect(p.x - w, p.y, p.x, p.y + h)


def rects_conflict(a: Rect, b: Rect) -> bool:
    """True iff the rect interiors overlap.

    All comparisons are strict: rects sharing only an edge or a corner
    point do not conflict.
    """
    return a.left < b.right and a.right > b.left and a.top < b.bottom and a.bottom > b.top


def project_features(features: list[Feature], view: Viewport) -> list[Feature]:
    """Apply the viewport transform to every feature position."""
    if view.is_identity:
        return list(features)
    out = []
    for f in features:
        sx, sy = view.project(f.position.x, f.position.y)
        out.append(Feature(f.id, ScreenPoint(sx, sy), f.priority, f.text))
    return out
