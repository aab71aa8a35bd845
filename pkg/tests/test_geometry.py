from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from localvol.geometry import (
    convex_hull, convex_hull_metrics, diameter, dilation_area_series, double_factorial,
    hull_dilation_area, intrinsic_power_volume, lens_union_area, union_of_disks_area,
)

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_hull_drops_interior_and_collinear_points():
    hull = convex_hull(SQUARE + [(0.5, 0.5), (0.5, 0)])
    assert sorted(hull) == sorted(map(lambda p: (float(p[0]), float(p[1])), SQUARE))


def test_collinear_hull_is_a_segment():
    assert len(convex_hull([(0, 0), (1, 1), (2, 2), (0.5, 0.5)])) == 2


@pytest.mark.parametrize("points, v1, v2", [
    ([(0, 0)], 0.0, 0.0),
    ([(0, 0), (1, 0)], 1.0, 0.0),
    ([(1, 0), (0, 1)], math.sqrt(2), 0.0),
    ([(0, 0), (1, 0), (0, 1)], 1 + math.sqrt(2) / 2, 0.5),
    (SQUARE, 2.0, 1.0),
])
def test_hull_metrics(points, v1, v2):
    m = convex_hull_metrics(points)
    assert m.v0 == 1
    assert m.v1 == pytest.approx(v1, abs=1e-15)
    assert m.v2 == pytest.approx(v2, abs=1e-15)


@pytest.mark.parametrize("points, expected", [
    ([(0, 0), (1, 0)], 1 / 12),
    ([(1, 0), (0, 1)], math.sqrt(2) / 6),
    ([(0, 0), (1, 0), (0, 1)], (math.sqrt(2) + 1) / 12),
    (SQUARE, 1 / 6),
])
def test_intrinsic_power_volume_of_unit_cell_sets(points, expected):
    # third order values for the four non-trivial white sets of a unit cell
    assert intrinsic_power_volume(points, 3) == pytest.approx(expected, abs=1e-15)


def test_intrinsic_power_volume_domain():
    with pytest.raises(ValueError):
        intrinsic_power_volume([(0, 0)], 3)
    with pytest.raises(ValueError):
        intrinsic_power_volume(SQUARE, 4)


def test_double_factorial():
    assert [double_factorial(n) for n in (-1, 0, 1, 5, 6)] == [1, 1, 1, 15, 48]


def test_union_of_single_and_tangent_disks():
    assert union_of_disks_area([(0, 0)], 1.0) == pytest.approx(math.pi, abs=1e-14)
    assert union_of_disks_area([(0, 0), (2, 0)], 1.0) == pytest.approx(2 * math.pi, abs=1e-12)
    assert union_of_disks_area([(0, 0), (0, 0)], 1.0) == pytest.approx(math.pi, abs=1e-14)


def test_lens_formula_matches_union():
    for d in (0.1, 0.7, 1.3, 1.99):
        assert union_of_disks_area([(0, 0), (d, 0)], 1.0) == pytest.approx(lens_union_area(d, 1.0), abs=1e-12)


def test_union_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        union_of_disks_area([(0, 0)], 0.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5)), min_size=1, max_size=5),
       st.floats(0.3, 1.5))
def test_union_area_matches_quadrature(centers, r):
    assert union_of_disks_area(centers, r) == pytest.approx(oracles.quad_union_area(centers, r), abs=1e-11)


def test_union_area_matches_grid_count():
    rng = np.random.default_rng(1)
    centers = rng.uniform(-1, 1, (6, 2))
    assert union_of_disks_area(centers, 0.6) == pytest.approx(oracles.grid_union_area(centers, 0.6), abs=5e-3)


@pytest.mark.parametrize("a", [0.05, 0.2, 0.5])
def test_dilation_series_converges_to_union(a):
    pts = [(a * x, a * y) for x, y in SQUARE]
    exact = union_of_disks_area(pts, 1.0)
    errs = [abs(dilation_area_series(pts, 1.0, n) - exact) for n in (1, 2, 3, 6)]
    assert errs[-1] < 1e-10
    assert errs[0] >= errs[1] >= errs[2]
    # single term leaves an a**5 remainder
    assert errs[0] < 10 * a**5


def test_dilation_series_needs_small_ratio():
    with pytest.raises(ValueError, match="a/r"):
        dilation_area_series([(0, 0), (3, 0)], 1.0, 2)


def test_hull_dilation_is_steiner():
    r = 0.7
    assert hull_dilation_area(SQUARE, r) == pytest.approx(1 + 2 * 2 * r + math.pi * r * r, abs=1e-14)
    assert diameter(SQUARE) == pytest.approx(math.sqrt(2))
