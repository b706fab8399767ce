"""Exact forward images of intervals and circular arcs under the map algebra.

Open balls in the continuum spaces are intervals or arcs, and every builtin
continuum map (rotations, integer-slope affine circle maps, piecewise-linear
interval maps) sends such a region to another one that this module computes
in closed form. Checkers use these exact images instead of sampled point
clouds whenever the family supports it: a collapsed region (zero width) is a
proof of collapse, and a region covering the space is a proof of a hit.

Binary-sequence maps are not covered; callers fall back to sampling there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .descriptors import (
    MapDescriptor,
    as_piecewise_linear,
    circle_canonical,
    pl_image,
)
from .space import (
    TWO_PI,
    CircleAngle,
    IntervalPoint,
    PhaseSpace,
    Point,
    SpaceError,
    SpaceKind,
    circle_distance,
    reduce_angle,
)


@dataclass(frozen=True)
class IntervalRegion:
    """A closed subinterval of [0, 1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi <= 1.0):
            raise SpaceError(f"bad interval region [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class ArcRegion:
    """A closed arc on the circle: angles start..start+length; full if length >= 2pi."""

    start: float
    length: float

    def __post_init__(self):
        if self.length < 0.0:
            raise SpaceError("arc length must be nonnegative")
        object.__setattr__(self, "start", reduce_angle(float(self.start)))
        object.__setattr__(self, "length", min(float(self.length), TWO_PI))

    @property
    def full(self) -> bool:
        return self.length >= TWO_PI


Region = Union[IntervalRegion, ArcRegion]


def ball_region(space: PhaseSpace, center: Point, radius: float) -> Region:
    """The open ball around center as a region (clipped to the space)."""
    space.require(center)
    if space.kind is SpaceKind.UNIT_INTERVAL:
        return IntervalRegion(max(0.0, center.x - radius), min(1.0, center.x + radius))
    if space.kind is SpaceKind.CIRCLE:
        if radius >= math.pi:
            return ArcRegion(0.0, TWO_PI)
        return ArcRegion(center.theta - radius, 2.0 * radius)
    raise SpaceError("regions are defined on continuum spaces only")


def step_region(region: Region, m: MapDescriptor) -> Region | None:
    """Exact image of the region under one map, or None when unsupported."""
    if isinstance(region, ArcRegion):
        canon = circle_canonical(m)
        if canon is None:
            return None
        slope, offset = canon
        if region.full:
            return region
        return ArcRegion(slope * region.start + offset, slope * region.length)
    pl = as_piecewise_linear(m)
    if pl is None:
        return None
    lo, hi = pl_image(pl, region.lo, region.hi)
    return IntervalRegion(lo, hi)


def region_width(region: Region) -> float:
    if isinstance(region, ArcRegion):
        return region.length
    return region.hi - region.lo


def region_diameter(region: Region) -> float:
    """Largest pairwise distance between points of the region."""
    if isinstance(region, ArcRegion):
        return min(region.length, math.pi)
    return region.hi - region.lo


def region_is_point(region: Region) -> bool:
    return region_width(region) == 0.0


def region_covers_space(region: Region) -> bool:
    if isinstance(region, ArcRegion):
        return region.full
    return region.lo == 0.0 and region.hi == 1.0


def region_contains(region: Region, p: Point) -> bool:
    if isinstance(region, ArcRegion):
        if not isinstance(p, CircleAngle):
            raise SpaceError("arc region probed with a non-circle point")
        if region.full:
            return True
        return reduce_angle(p.theta - region.start) <= region.length
    if not isinstance(p, IntervalPoint):
        raise SpaceError("interval region probed with a non-interval point")
    return region.lo <= p.x <= region.hi


def region_distance(region: Region, p: Point) -> float:
    """Distance from a point to the region (0 when contained)."""
    if region_contains(region, p):
        return 0.0
    if isinstance(region, ArcRegion):
        end = reduce_angle(region.start + region.length)
        return min(circle_distance(p.theta, region.start), circle_distance(p.theta, end))
    if p.x < region.lo:
        return region.lo - p.x
    return p.x - region.hi


def region_covering_defect(region: Region) -> float:
    """sup over the space of the distance to the region.

    This is the Hausdorff distance between the region and the whole space,
    since the region is a subset.
    """
    if isinstance(region, ArcRegion):
        if region.full:
            return 0.0
        return (TWO_PI - region.length) / 2.0
    return max(region.lo, 1.0 - region.hi)


def region_midpoint(region: Region) -> Point:
    if isinstance(region, ArcRegion):
        return CircleAngle(region.start + region.length / 2.0)
    return IntervalPoint((region.lo + region.hi) / 2.0)


def region_to_json(region: Region) -> dict:
    if isinstance(region, ArcRegion):
        return {"kind": "arc", "start": region.start, "length": region.length}
    return {"kind": "interval", "lo": region.lo, "hi": region.hi}


def family_supports_regions(space: PhaseSpace, probe: list[MapDescriptor]) -> bool:
    """True when every probed step has an exact region image."""
    if space.kind is SpaceKind.BINARY_SEQ:
        return False
    if space.kind is SpaceKind.CIRCLE:
        return all(circle_canonical(m) is not None for m in probe)
    return all(as_piecewise_linear(m) is not None for m in probe)
