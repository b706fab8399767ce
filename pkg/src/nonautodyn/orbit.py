"""Orbit computation: forward compositions, windowed compositions, limit iterates.

Orbits index from 0 with the identity, so states[n] is the point after maps
1..n have been applied. Windowed composition applies maps n+1..n+k, which
makes the semigroup identity

    omega(fam, x, n + k) == omega_window(fam, omega(fam, x, n), n, k)

hold bit-exactly: both sides perform the same float operations in the same
order. Evaluation is forward-only; no inverse maps are ever computed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .descriptors import apply
from .family import MapFamily
from .space import Point, SpaceError


@dataclass(frozen=True)
class Trajectory:
    """Realized orbit: states[n] is the point after n steps, states[0] the start."""

    start: Point
    states: tuple[Point, ...]
    horizon: int

    def __post_init__(self):
        if len(self.states) != self.horizon + 1:
            raise SpaceError("trajectory length must be horizon + 1")
        if self.states[0] != self.start:
            raise SpaceError("trajectory must begin at its start point")


@dataclass(frozen=True)
class CompositionWindow:
    """Evaluated window: points[j] is the image after maps n+1..n+j."""

    base_index: int
    length: int
    points: tuple[Point, ...]


def omega(fam: MapFamily, x: Point, n: int) -> Point:
    """Apply maps 1..n in order; n = 0 returns x unchanged."""
    if n < 0:
        raise SpaceError("orbit index must be nonnegative")
    fam.space.require(x)
    y = x
    for i in range(1, n + 1):
        y = apply(fam.member(i), y)
    return y


def omega_window(fam: MapFamily, x: Point, n: int, k: int) -> Point:
    """Apply maps n+1..n+k in order; k = 0 returns x unchanged."""
    if n < 0 or k < 0:
        raise SpaceError("window indices must be nonnegative")
    fam.space.require(x)
    y = x
    for i in range(n + 1, n + k + 1):
        y = apply(fam.member(i), y)
    return y


def window(fam: MapFamily, x: Point, n: int, k: int) -> CompositionWindow:
    """Windowed composition with every intermediate state recorded."""
    if n < 0 or k < 0:
        raise SpaceError("window indices must be nonnegative")
    fam.space.require(x)
    pts = [x]
    for i in range(n + 1, n + k + 1):
        pts.append(apply(fam.member(i), pts[-1]))
    return CompositionWindow(n, k, tuple(pts))


def limit_iterate(fam: MapFamily, x: Point, k: int) -> Point:
    """k-fold application of the limit map."""
    if k < 0:
        raise SpaceError("iterate count must be nonnegative")
    fam.space.require(x)
    y = x
    for _ in range(k):
        y = apply(fam.limit, y)
    return y


def trajectory(fam: MapFamily, x: Point, horizon: int) -> Trajectory:
    """Forward orbit sweep; states[n] equals omega(fam, x, n) for every n."""
    if horizon < 0:
        raise SpaceError("horizon must be nonnegative")
    fam.space.require(x)
    states = [x]
    for i in range(1, horizon + 1):
        states.append(apply(fam.member(i), states[-1]))
    return Trajectory(x, tuple(states), horizon)


def limit_trajectory(fam: MapFamily, x: Point, horizon: int) -> Trajectory:
    """Forward orbit of the autonomous limit system."""
    if horizon < 0:
        raise SpaceError("horizon must be nonnegative")
    fam.space.require(x)
    states = [x]
    for _ in range(horizon):
        states.append(apply(fam.limit, states[-1]))
    return Trajectory(x, tuple(states), horizon)
