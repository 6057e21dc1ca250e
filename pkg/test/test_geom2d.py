from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import qmc

from averaged_shelling.exactnum import quadVal
from averaged_shelling.geom2d import (
    area2,
    convex_hull,
    convexWindow,
    exactPoint2,
    intersect,
    intersect_intervals,
    intervalWindow,
    minkowski_difference,
    overlap_fraction,
)


def pt(x, y, basis="sqrt2"):
    return exactPoint2(quadVal(Fraction(x), 0, basis), quadVal(Fraction(y), 0, basis))


@pytest.fixture
def unit_square():
    return convex_hull([pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1), pt("1/2", "1/2")])


def test_hull_drops_interior_and_collinear_points(unit_square):
    assert len(unit_square.vertices) == 4
    assert area2(unit_square) == 2
    hull = convex_hull([pt(0, 0), pt("1/2", 0), pt(1, 0), pt(0, 1)])
    assert len(hull.vertices) == 3


def test_hull_of_collinear_points_raises():
    with pytest.raises(ValueError):
        convex_hull([pt(0, 0), pt(1, 1), pt(2, 2)])


def test_contains_open_and_closed(unit_square):
    assert unit_square.contains(pt("1/2", "1/2"))
    assert not unit_square.contains(pt(1, "1/2"))
    assert unit_square.contains(pt(1, "1/2"), strict=False)
    assert not unit_square.contains(pt(2, 0), strict=False)


def test_intersection_area(unit_square):
    shifted = unit_square.translate(pt("1/2", "1/2"))
    common = intersect(unit_square, shifted)
    assert area2(common) == Fraction(1, 2)


def test_disjoint_and_touching_windows_do_not_intersect(unit_square):
    assert intersect(unit_square, unit_square.translate(pt(3, 0))) is None
    assert intersect(unit_square, unit_square.translate(pt(1, 0))) is None


def test_overlap_fraction(unit_square):
    assert overlap_fraction(unit_square, pt(0, 0)) == 1
    assert overlap_fraction(unit_square, pt("1/2", 0)) == Fraction(1, 2)
    assert overlap_fraction(unit_square, pt(1, 1)) == 0


def test_interval_overlap():
    half = quadVal(0, 1, "sqrt2") / 2
    window = intervalWindow(-half, half)
    assert overlap_fraction(window, quadVal(1)) == quadVal(1, Fraction(-1, 2), "sqrt2")
    assert overlap_fraction(window, quadVal(-1)) == quadVal(1, Fraction(-1, 2), "sqrt2")
    assert overlap_fraction(window, quadVal(2)) == 0
    assert window.contains(quadVal(0))
    assert not window.contains(half)


def test_interval_intersection():
    window = intervalWindow(quadVal(-1), quadVal(2))
    other = intervalWindow(quadVal(0, 1, "sqrt2"), quadVal(3))
    assert intersect_intervals(window, other) == intervalWindow(quadVal(0, 1, "sqrt2"), quadVal(2))
    assert intersect_intervals(other, window) == intersect_intervals(window, other)
    assert intersect_intervals(window, window.translate(quadVal(3))) is None


def test_minkowski_difference(unit_square):
    difference = minkowski_difference(unit_square, unit_square)
    assert area2(difference) == 8
    assert difference.contains(pt("99/100", "-99/100"))
    interval = intervalWindow(quadVal(-1), quadVal(1))
    assert minkowski_difference(interval, interval) == intervalWindow(quadVal(-2), quadVal(2))


def test_irrational_coordinates():
    tau = quadVal(0, 1, "tau")
    triangle = convexWindow(
        (
            exactPoint2(quadVal(0, 0, "tau"), quadVal(0, 0, "tau")),
            exactPoint2(tau, quadVal(0, 0, "tau")),
            exactPoint2(quadVal(0, 0, "tau"), tau),
        )
    )
    assert area2(triangle) == tau * tau
    assert triangle.reflect().contains(exactPoint2(quadVal(Fraction(-1, 2), 0, "tau"), quadVal(Fraction(-1, 2), 0, "tau")))


def test_window_validation():
    with pytest.raises(ValueError):
        convexWindow((pt(0, 0), pt(1, 0)))
    with pytest.raises(ValueError):
        intervalWindow(quadVal(1), quadVal(0))


def _float_inside(vertices, points):
    inside = np.ones(len(points), dtype=bool)
    for a, b in zip(vertices, np.roll(vertices, -1, axis=0)):
        cross = (b[0] - a[0]) * (points[:, 1] - a[1]) - (b[1] - a[1]) * (points[:, 0] - a[0])
        inside &= cross > 0
    return inside


@pytest.mark.parametrize(
    "cases, log2_samples",
    [(25, 12), pytest.param(100, 20, marks=pytest.mark.slow)],
)
def test_overlap_area_against_monte_carlo(cases, log2_samples):
    rng = np.random.default_rng(2024)
    samples = 1 << log2_samples
    checked = 0
    while checked < cases:
        cloud = [pt(Fraction(int(x), 16), Fraction(int(y), 16)) for x, y in rng.integers(0, 33, (7, 2))]
        try:
            window = convex_hull(cloud)
        except ValueError:
            continue
        dx, dy = rng.integers(-8, 9, 2)
        other = window.translate(pt(Fraction(int(dx), 16), Fraction(int(dy), 16)))
        common = intersect(window, other)
        exact = 0.0 if common is None else float(area2(common)) / 2

        first = np.array([[float(v.x), float(v.y)] for v in window.vertices])
        second = np.array([[float(v.x), float(v.y)] for v in other.vertices])
        lo, hi = first.min(axis=0), first.max(axis=0)
        sobol = qmc.Sobol(d=2, scramble=True, seed=rng)
        points = lo + (hi - lo) * sobol.random_base2(m=log2_samples)
        hits = _float_inside(first, points) & _float_inside(second, points)
        box = float(np.prod(hi - lo))
        share = hits.mean()
        estimate = box * share
        error = box * np.sqrt(max(share * (1 - share), 1.0 / samples) / samples)
        assert abs(estimate - exact) <= 3 * error
        checked += 1


def test_overlap_is_even_and_monotone_along_rays():
    octagon = convex_hull(
        [pt(x, y) for x, y in [(1, 0), (2, 0), (3, 1), (3, 2), (2, 3), (1, 3), (0, 2), (0, 1)]]
    )
    triangle = convex_hull([pt(0, 0), pt(3, 0), pt(1, 2)])
    for window in (octagon, triangle):
        for dx, dy in [("1/2", 0), ("1/3", "2/3"), ("-3/4", "1/4"), (1, 1)]:
            shift = pt(dx, dy)
            value = overlap_fraction(window, shift)
            assert overlap_fraction(window, -shift) == value
            assert 0 <= value <= 1
            for scale in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
                assert overlap_fraction(window, shift.scale(scale)) >= value


def test_intersection_area_is_commutative(unit_square):
    triangle = convex_hull([pt("-1/2", "-1/2"), pt("3/2", "-1/2"), pt("1/2", "3/2")])
    forward = area2(intersect(unit_square, triangle))
    assert forward == area2(intersect(triangle, unit_square))
    assert forward <= min(area2(unit_square), area2(triangle))
