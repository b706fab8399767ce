"""Evaluable map descriptors and their symbolic algebra.

The descriptor variants cover every concrete map this package simulates:
circle rotations and integer-slope affine circle maps, piecewise-linear
interval maps, the binary odometer (add 1 with carry), coordinate deletion
on binary words, lookup tables, and formal compositions.

Symbolic-first policy: wherever two descriptors admit a closed form
(rotation offsets, equal-slope affine pairs, piecewise-linear node maxima)
the algebra computes it exactly and marks the result exact; grid estimates
are the fallback and are flagged approximate.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .space import (
    TWO_PI,
    BinaryWord,
    CircleAngle,
    IntervalPoint,
    PhaseSpace,
    Point,
    ResolutionError,
    SpaceError,
    SpaceKind,
    circle_distance,
    distance,
    reduce_angle,
    sample_grid,
)


@dataclass(frozen=True)
class Rotation:
    """theta -> theta + amount (mod 2pi); amount stored reduced into [0, 2pi)."""

    amount: float

    def __post_init__(self):
        object.__setattr__(self, "amount", reduce_angle(float(self.amount)))

    @property
    def space_kind(self) -> SpaceKind:
        return SpaceKind.CIRCLE


@dataclass(frozen=True)
class AffineCircle:
    """theta -> slope*theta + offset (mod 2pi) with integer slope >= 1."""

    slope: int
    offset: float

    def __post_init__(self):
        if int(self.slope) != self.slope or self.slope < 1:
            raise SpaceError(f"affine circle slope must be an integer >= 1, got {self.slope}")
        object.__setattr__(self, "slope", int(self.slope))
        object.__setattr__(self, "offset", reduce_angle(float(self.offset)))

    @property
    def space_kind(self) -> SpaceKind:
        return SpaceKind.CIRCLE


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear self map of [0, 1].

    Breakpoints are (x, y) pairs with strictly increasing x spanning [0, 1]
    and all y in [0, 1].
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        bps = tuple((float(x), float(y)) for x, y in self.breakpoints)
        if len(bps) < 2:
            raise SpaceError("piecewise-linear map needs at least two breakpoints")
        xs = [x for x, _ in bps]
        if xs[0] != 0.0 or xs[-1] != 1.0:
            raise SpaceError("breakpoints must span [0, 1]")
        if any(x1 - x0 <= 0 for x0, x1 in zip(xs, xs[1:])):
            raise SpaceError("breakpoint x values must be strictly increasing")
        if any(not (0.0 <= y <= 1.0) for _, y in bps):
            raise SpaceError("breakpoint y values must lie in [0, 1]")
        object.__setattr__(self, "breakpoints", bps)

    @property
    def space_kind(self) -> SpaceKind:
        return SpaceKind.UNIT_INTERVAL

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.breakpoints)

    @property
    def ys(self) -> tuple[float, ...]:
        return tuple(y for _, y in self.breakpoints)


@dataclass(frozen=True)
class Lookup:
    """Table of values on the uniform grid over [0, 1] with an interpolation rule."""

    values: tuple[float, ...]
    rule: str = "linear"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 2:
            raise SpaceError("lookup table needs at least two values")
        if any(not (0.0 <= v <= 1.0) for v in vals):
            raise SpaceError("lookup values must lie in [0, 1]")
        if self.rule not in ("linear", "nearest"):
            raise SpaceError(f"unknown interpolation rule: {self.rule!r}")
        object.__setattr__(self, "values", vals)

    @property
    def space_kind(self) -> SpaceKind:
        return SpaceKind.UNIT_INTERVAL


@dataclass(frozen=True)
class OdometerAdd:
    """Binary add-with-carry of 100...: flip leading 1s to 0, first 0 to 1."""

    @property
    def space_kind(self) -> SpaceKind:
        return SpaceKind.BINARY_SEQ


@dataclass(frozen=True)
class Delete:
    """Drop the index-th coordinate of a binary word (1-based).

    Deleting beyond the trusted prefix leaves the word unchanged: the
    deletion happens entirely in coordinates the word never resolved.
    """

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise SpaceError("delete index must be >= 1")
        object.__setattr__(self, "index", int(self.index))

    @property
    def space_kind(self) -> SpaceKind:
        return SpaceKind.BINARY_SEQ


@dataclass(frozen=True)
class Compose:
    """outer after inner; both operands must act on the same space kind."""

    outer: "MapDescriptor"
    inner: "MapDescriptor"

    def __post_init__(self):
        if self.outer.space_kind != self.inner.space_kind:
            raise SpaceError("compose operands act on different space kinds")

    @property
    def space_kind(self) -> SpaceKind:
        return self.inner.space_kind


MapDescriptor = Union[Rotation, AffineCircle, PiecewiseLinear, Lookup, OdometerAdd, Delete, Compose]


# ---------------------------------------------------------------------------
# evaluation

def _pl_eval(pl: PiecewiseLinear, x: float) -> float:
    xs, ys = pl.xs, pl.ys
    i = bisect.bisect_right(xs, x) - 1
    if i >= len(xs) - 1:
        return ys[-1]
    x0, y0 = xs[i], ys[i]
    x1, y1 = xs[i + 1], ys[i + 1]
    if x == x0:
        return y0
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def _lookup_eval(m: Lookup, x: float) -> float:
    n = len(m.values)
    if m.rule == "nearest":
        i = int(round(x * (n - 1)))
        return m.values[min(max(i, 0), n - 1)]
    pos = x * (n - 1)
    i = min(int(pos), n - 2)
    frac = pos - i
    return m.values[i] + (m.values[i + 1] - m.values[i]) * frac


def apply(m: MapDescriptor, x: Point) -> Point:
    """Evaluate a descriptor at a point."""
    if isinstance(m, Rotation):
        if not isinstance(x, CircleAngle):
            raise SpaceError("rotation applied to a non-circle point")
        return CircleAngle(x.theta + m.amount)
    if isinstance(m, AffineCircle):
        if not isinstance(x, CircleAngle):
            raise SpaceError("affine circle map applied to a non-circle point")
        return CircleAngle(m.slope * x.theta + m.offset)
    if isinstance(m, PiecewiseLinear):
        if not isinstance(x, IntervalPoint):
            raise SpaceError("piecewise-linear map applied to a non-interval point")
        return IntervalPoint(_pl_eval(m, x.x))
    if isinstance(m, Lookup):
        if not isinstance(x, IntervalPoint):
            raise SpaceError("lookup map applied to a non-interval point")
        return IntervalPoint(_lookup_eval(m, x.x))
    if isinstance(m, OdometerAdd):
        if not isinstance(x, BinaryWord):
            raise SpaceError("odometer applied to a non-binary point")
        bits = list(x.bits)
        for i in range(len(bits)):
            if bits[i] == 0:
                bits[i] = 1
                break
            bits[i] = 0
        return BinaryWord(tuple(bits), x.effective_length)
    if isinstance(m, Delete):
        if not isinstance(x, BinaryWord):
            raise SpaceError("delete applied to a non-binary point")
        if m.index > x.effective_length:
            return x
        if x.effective_length <= 1:
            raise ResolutionError(
                f"cannot delete coordinate {m.index} of a word with effective length "
                f"{x.effective_length}"
            )
        bits = x.bits[: m.index - 1] + x.bits[m.index :]
        return BinaryWord(bits, x.effective_length - 1)
    if isinstance(m, Compose):
        return apply(m.outer, apply(m.inner, x))
    raise SpaceError(f"not a map descriptor: {m!r}")


def apply_batch(m: MapDescriptor, arr: np.ndarray, kind: SpaceKind) -> np.ndarray:
    """Vectorized evaluation on coordinate arrays (continuum spaces only)."""
    if kind is SpaceKind.CIRCLE:
        if isinstance(m, Rotation):
            return np.mod(arr + m.amount, TWO_PI)
        if isinstance(m, AffineCircle):
            return np.mod(m.slope * arr + m.offset, TWO_PI)
        if isinstance(m, Compose):
            return apply_batch(m.outer, apply_batch(m.inner, arr, kind), kind)
        raise SpaceError(f"descriptor {type(m).__name__} is not a circle map")
    if kind is SpaceKind.UNIT_INTERVAL:
        if isinstance(m, PiecewiseLinear):
            return np.interp(arr, m.xs, m.ys)
        if isinstance(m, Lookup):
            grid = np.linspace(0.0, 1.0, len(m.values))
            if m.rule == "linear":
                return np.interp(arr, grid, m.values)
            idx = np.clip(np.rint(arr * (len(m.values) - 1)).astype(int), 0, len(m.values) - 1)
            return np.asarray(m.values)[idx]
        if isinstance(m, Compose):
            return apply_batch(m.outer, apply_batch(m.inner, arr, kind), kind)
        raise SpaceError(f"descriptor {type(m).__name__} is not an interval map")
    raise SpaceError("batch evaluation is only defined for continuum spaces")


# ---------------------------------------------------------------------------
# canonical forms

def circle_canonical(m: MapDescriptor) -> tuple[int, float] | None:
    """(slope, offset) of a circle map, flattening compositions; None otherwise."""
    if isinstance(m, Rotation):
        return (1, m.amount)
    if isinstance(m, AffineCircle):
        return (m.slope, m.offset)
    if isinstance(m, Compose) and m.space_kind is SpaceKind.CIRCLE:
        outer = circle_canonical(m.outer)
        inner = circle_canonical(m.inner)
        if outer is None or inner is None:
            return None
        mo, co = outer
        mi, ci = inner
        return (mo * mi, reduce_angle(mo * ci + co))
    return None


def lookup_to_pl(m: Lookup) -> PiecewiseLinear | None:
    if m.rule != "linear":
        return None
    n = len(m.values)
    return PiecewiseLinear(tuple((i / (n - 1), v) for i, v in enumerate(m.values)))


def pl_compose(outer: PiecewiseLinear, inner: PiecewiseLinear) -> PiecewiseLinear:
    """Exact composition outer(inner(x)) as a piecewise-linear map.

    Nodes are inner's breakpoints plus the preimages (under each inner
    segment) of outer's breakpoints; the composite is linear between
    consecutive nodes.
    """
    nodes = set(inner.xs)
    oxs = outer.xs
    ixs, iys = inner.xs, inner.ys
    for (x0, y0), (x1, y1) in zip(inner.breakpoints, inner.breakpoints[1:]):
        if y1 == y0:
            continue
        lo, hi = min(y0, y1), max(y0, y1)
        for bx in oxs:
            if lo < bx < hi:
                t = (bx - y0) / (y1 - y0)
                nodes.add(x0 + t * (x1 - x0))
    xs = sorted(nodes)
    pts = tuple((x, _pl_eval(outer, _pl_eval(inner, x))) for x in xs)
    return PiecewiseLinear(pts)


def as_piecewise_linear(m: MapDescriptor) -> PiecewiseLinear | None:
    """Flatten an interval descriptor to a single piecewise-linear map, if possible."""
    if isinstance(m, PiecewiseLinear):
        return m
    if isinstance(m, Lookup):
        return lookup_to_pl(m)
    if isinstance(m, Compose) and m.space_kind is SpaceKind.UNIT_INTERVAL:
        outer = as_piecewise_linear(m.outer)
        inner = as_piecewise_linear(m.inner)
        if outer is None or inner is None:
            return None
        return pl_compose(outer, inner)
    return None


def compose(outer: MapDescriptor, inner: MapDescriptor) -> MapDescriptor:
    """Compose two descriptors, canonicalizing when the algebra permits."""
    if outer.space_kind != inner.space_kind:
        raise SpaceError("compose operands act on different space kinds")
    if outer.space_kind is SpaceKind.CIRCLE:
        canon = circle_canonical(Compose(outer, inner))
        if canon is not None:
            slope, offset = canon
            return Rotation(offset) if slope == 1 else AffineCircle(slope, offset)
    if outer.space_kind is SpaceKind.UNIT_INTERVAL:
        pl = as_piecewise_linear(Compose(outer, inner))
        if pl is not None:
            return pl
    return Compose(outer, inner)


def zero_slope_pieces(pl: PiecewiseLinear) -> list[tuple[float, float]]:
    """Maximal intervals on which the map is constant."""
    flat: list[tuple[float, float]] = []
    for (x0, y0), (x1, y1) in zip(pl.breakpoints, pl.breakpoints[1:]):
        if y1 == y0:
            if flat and flat[-1][1] == x0:
                flat[-1] = (flat[-1][0], x1)
            else:
                flat.append((x0, x1))
    return flat


def pl_image(pl: PiecewiseLinear, lo: float, hi: float) -> tuple[float, float]:
    """Exact image interval of [lo, hi] under a continuous PL map."""
    vals = [_pl_eval(pl, lo), _pl_eval(pl, hi)]
    for x, y in pl.breakpoints:
        if lo < x < hi:
            vals.append(y)
    return (min(vals), max(vals))


def pl_fixed_points(pl: PiecewiseLinear) -> list[float]:
    """All x in [0, 1] with pl(x) = x, one representative per solution."""
    out: list[float] = []
    for (x0, y0), (x1, y1) in zip(pl.breakpoints, pl.breakpoints[1:]):
        s = (y1 - y0) / (x1 - x0)
        if s == 1.0:
            if y0 == x0:
                out.extend([x0, x1])
            continue
        x = (y0 - s * x0) / (1.0 - s)
        if x0 - 1e-12 <= x <= x1 + 1e-12:
            out.append(min(max(x, x0), x1))
    dedup: list[float] = []
    for x in sorted(out):
        if not dedup or x - dedup[-1] > 1e-12:
            dedup.append(x)
    return dedup


def circle_map_fixed_points(slope: int, offset: float) -> list[float] | None:
    """All theta with slope*theta + offset = theta (mod 2pi).

    Returns None for the identity map, whose fixed-point set is the whole
    circle.
    """
    if slope == 1:
        return None if reduce_angle(offset) == 0.0 else []
    n = slope - 1
    return sorted(reduce_angle((TWO_PI * j - offset) / n) for j in range(n))


def descriptor_to_json(m: MapDescriptor) -> dict:
    if isinstance(m, Rotation):
        return {"type": "rotation", "amount": m.amount}
    if isinstance(m, AffineCircle):
        return {"type": "affine_circle", "slope": m.slope, "offset": m.offset}
    if isinstance(m, PiecewiseLinear):
        return {"type": "piecewise_linear", "breakpoints": [list(p) for p in m.breakpoints]}
    if isinstance(m, Lookup):
        return {"type": "lookup", "values": list(m.values), "rule": m.rule}
    if isinstance(m, OdometerAdd):
        return {"type": "odometer_add"}
    if isinstance(m, Delete):
        return {"type": "delete", "index": m.index}
    if isinstance(m, Compose):
        return {
            "type": "compose",
            "outer": descriptor_to_json(m.outer),
            "inner": descriptor_to_json(m.inner),
        }
    raise SpaceError(f"not a map descriptor: {m!r}")


def descriptor_from_json(doc: dict) -> MapDescriptor:
    t = doc["type"]
    if t == "rotation":
        return Rotation(float(doc["amount"]))
    if t == "affine_circle":
        return AffineCircle(int(doc["slope"]), float(doc["offset"]))
    if t == "piecewise_linear":
        return PiecewiseLinear(tuple((float(x), float(y)) for x, y in doc["breakpoints"]))
    if t == "lookup":
        return Lookup(tuple(float(v) for v in doc["values"]), doc.get("rule", "linear"))
    if t == "odometer_add":
        return OdometerAdd()
    if t == "delete":
        return Delete(int(doc["index"]))
    if t == "compose":
        return Compose(descriptor_from_json(doc["outer"]), descriptor_from_json(doc["inner"]))
    raise SpaceError(f"unknown descriptor type: {t!r}")


# ---------------------------------------------------------------------------
# supremum metric

@dataclass(frozen=True)
class SupEstimate:
    """Supremum-metric value with an exactness flag.

    Grid results are maxima over a finite grid and therefore lower bounds
    of the true supremum; closed-form results are exact.
    """

    value: float
    exact: bool


def sup_metric(space: PhaseSpace, g: MapDescriptor, h: MapDescriptor, grid_resolution: int) -> SupEstimate:
    """Estimate sup_x d(g(x), h(x)), exactly where the descriptors permit."""
    if g.space_kind != h.space_kind or g.space_kind != space.kind:
        raise SpaceError("sup metric needs two maps on the given space")
    if grid_resolution < 2:
        raise SpaceError("grid resolution must be >= 2")
    if g == h:
        return SupEstimate(0.0, True)

    if space.kind is SpaceKind.CIRCLE:
        cg, ch = circle_canonical(g), circle_canonical(h)
        if cg is not None and ch is not None:
            if cg[0] == ch[0]:
                return SupEstimate(circle_distance(cg[1], ch[1]), True)
            # differing integer slopes: the pointwise gap sweeps the whole
            # circle, so the supremum is the diameter
            return SupEstimate(math.pi, True)
    elif space.kind is SpaceKind.UNIT_INTERVAL:
        pg, ph = as_piecewise_linear(g), as_piecewise_linear(h)
        if pg is not None and ph is not None:
            nodes = sorted(set(pg.xs) | set(ph.xs))
            val = max(abs(_pl_eval(pg, x) - _pl_eval(ph, x)) for x in nodes)
            return SupEstimate(val, True)

    worst = 0.0
    for x in sample_grid(space, grid_resolution):
        d = distance(space, apply(g, x), apply(h, x))
        if d > worst:
            worst = d
    return SupEstimate(worst, False)
