"""Exact forward-image regions versus sampled oracles."""

import math

import numpy as np
import pytest

from nonautodyn.descriptors import AffineCircle, Rotation, apply
from nonautodyn.family import PLATEAU_HEAD, TENT
from nonautodyn.regions import (
    ArcRegion,
    IntervalRegion,
    ball_region,
    family_supports_regions,
    region_contains,
    region_covering_defect,
    region_diameter,
    region_distance,
    region_is_point,
    region_midpoint,
    step_region,
)
from nonautodyn.space import (
    TWO_PI,
    CircleAngle,
    IntervalPoint,
    PhaseSpace,
    distance,
)

CIRCLE = PhaseSpace.circle()
INTERVAL = PhaseSpace.unit_interval()


def test_ball_region_shapes():
    r = ball_region(INTERVAL, IntervalPoint(0.5), 0.1)
    assert (r.lo, r.hi) == (0.4, 0.6)
    a = ball_region(CIRCLE, CircleAngle(0.0), 0.2)
    assert a.length == pytest.approx(0.4)


def test_interval_step_matches_dense_sampling():
    region = IntervalRegion(0.3, 0.45)
    image = step_region(region, TENT)
    samples = [apply(TENT, IntervalPoint(v)).x for v in np.linspace(0.3, 0.45, 400)]
    assert image.lo == pytest.approx(min(samples), abs=1e-6)
    assert image.hi == pytest.approx(max(samples), abs=1e-6)


def test_arc_step_under_doubling():
    arc = ArcRegion(1.0, 0.5)
    image = step_region(arc, AffineCircle(2, 0.25))
    assert image.start == pytest.approx(2.25)
    assert image.length == pytest.approx(1.0)
    # membership oracle
    for t in np.linspace(0, 0.5, 50):
        p = apply(AffineCircle(2, 0.25), CircleAngle(1.0 + t))
        assert region_contains(image, p)


def test_arc_wraps_to_full_cover():
    arc = ArcRegion(0.0, 2.0)
    image = step_region(step_region(arc, AffineCircle(2, 0.0)), AffineCircle(2, 0.0))
    assert image.full
    assert region_covering_defect(image) == 0.0


def test_plateau_collapse_detected():
    region = ball_region(INTERVAL, IntervalPoint(0.25), 0.1)
    image = step_region(region, PLATEAU_HEAD)
    assert region_is_point(image)
    assert region_midpoint(image).x == 1.0


def test_rotation_preserves_arc_length():
    arc = ArcRegion(0.3, 0.8)
    image = step_region(arc, Rotation(1.7))
    assert image.length == arc.length


def test_region_distance_matches_sampled_minimum():
    arc = ArcRegion(5.5, 0.9)  # wraps through zero
    for theta in np.linspace(0, TWO_PI, 37, endpoint=False):
        p = CircleAngle(theta)
        dense = min(
            distance(CIRCLE, p, CircleAngle(5.5 + t)) for t in np.linspace(0, 0.9, 600)
        )
        assert region_distance(arc, p) == pytest.approx(dense, abs=2e-3)

    region = IntervalRegion(0.2, 0.4)
    assert region_distance(region, IntervalPoint(0.1)) == pytest.approx(0.1)
    assert region_distance(region, IntervalPoint(0.3)) == 0.0
    assert region_distance(region, IntervalPoint(0.9)) == pytest.approx(0.5)


def test_covering_defect_values():
    assert region_covering_defect(IntervalRegion(0.25, 1.0)) == 0.25
    assert region_covering_defect(IntervalRegion(0.0, 1.0)) == 0.0
    arc = ArcRegion(0.0, math.pi)
    assert region_covering_defect(arc) == pytest.approx(math.pi / 2)


def test_diameter_caps_at_geodesic_diameter():
    assert region_diameter(ArcRegion(0.0, 0.4)) == pytest.approx(0.4)
    assert region_diameter(ArcRegion(0.0, 5.0)) == math.pi
    assert region_diameter(IntervalRegion(0.2, 0.7)) == pytest.approx(0.5)


def test_family_support_probe():
    assert family_supports_regions(CIRCLE, [Rotation(1.0), AffineCircle(2, 0.1)])
    assert family_supports_regions(INTERVAL, [TENT, PLATEAU_HEAD])
    from nonautodyn.descriptors import OdometerAdd

    assert not family_supports_regions(PhaseSpace.binary_seq(8), [OdometerAdd()])
