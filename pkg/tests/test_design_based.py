from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import ellipe

from localvol.boolean_model import replicate_rng
from localvol.config_algebra import WeightVector
from localvol.design_based import (
    Annulus, Disk, DiskUnion, Ellipse, RandomLatticeDraw, boundary_constants, class_boundary_density,
    count_bound_check, design_histograms, digitize_shape, ellipse_half_perimeter, mc_design_estimate,
    minus_h, reference_value,
)
from localvol.estimators import CATALOG
from localvol.lattice_image import Lattice, config_histogram

S2 = math.sqrt(2)


@pytest.mark.parametrize("a, b", [(1, 1), (2, 1), (3, 0.5), (1, 0.01)])
def test_ellipse_half_perimeter(a, b):
    # scipy's ellipe takes the parameter m = 1 - b^2 / a^2
    expected = 2 * max(a, b) * ellipe(1 - (min(a, b) / max(a, b)) ** 2)
    assert ellipse_half_perimeter(a, b) == pytest.approx(expected, rel=1e-13)
    assert ellipse_half_perimeter(b, a) == pytest.approx(expected, rel=1e-13)


def test_shape_membership():
    e = Ellipse((1.0, 0.0), (2.0, 1.0), tilt=math.pi / 2)
    assert e.contains(1.0, 1.9) and not e.contains(2.9, 0.0)
    ann = Annulus((0, 0), 0.5, 1.0)
    assert ann.contains(0.75, 0) and not ann.contains(0.2, 0)
    union = DiskUnion((Disk((0, 0), 1.0), Disk((3, 0), 1.0)))
    np.testing.assert_array_equal(union.contains(np.array([0, 1.5, 3]), np.zeros(3)), [True, False, True])


def test_reference_values():
    union = DiskUnion((Disk((0, 0), 1.0), Disk((3, 0), 0.5)))
    assert reference_value(union, 0) == 2
    assert reference_value(union, 1) == pytest.approx(1.5 * math.pi)
    assert reference_value(Annulus((0, 0), 0.5, 1.0), 0) == 0
    with pytest.raises(ValueError):
        reference_value(union, 2)


def test_shape_validation():
    with pytest.raises(ValueError):
        DiskUnion((Disk((0, 0), 1.0), Disk((1.5, 0), 1.0)))
    with pytest.raises(ValueError):
        Annulus((0, 0), 1.0, 1.0)


def test_digitized_shape_has_empty_border():
    lat = RandomLatticeDraw.sample(replicate_rng(0, 0)).lattice(0.05)
    bits = digitize_shape(Ellipse((0.3, -0.2), (1.0, 0.6), 0.4), lat).to_array()
    assert bits.any()
    assert not (bits[0].any() or bits[-1].any() or bits[:, 0].any() or bits[:, -1].any())


def test_random_draws_are_reproducible():
    d = RandomLatticeDraw.sample(replicate_rng(4, 2))
    assert d == RandomLatticeDraw.sample(replicate_rng(4, 2))
    assert 0 <= d.c[0] < 1 and 0 <= d.c[1] < 1 and 0 <= d.v < 2 * math.pi


def test_point_count_area_is_unbiased_in_design():
    # every shape with a regular boundary: mean point count * a^2 equals the area
    disk = Disk((0.2, 0.1), 1.0)
    hists = list(design_histograms(disk, 0.1, 400, seed=1))
    est = [0.01 * np.dot(CATALOG["point-count"].weights.array, h.class_counts) for h in hists]
    assert np.mean(est) == pytest.approx(math.pi, abs=4 * np.std(est) / 20)


def test_design_estimate_rejects_interior_weights():
    with pytest.raises(ValueError, match="w1 = w6 = 0"):
        mc_design_estimate(Disk((0, 0), 1.0), 0.1, WeightVector(1, (1, 0, 0, 0, 0, 0)), 3, 0)


def test_corrected_cauchy_bias_on_disk():
    # a row meeting the disk carries two boundary edges unless its chord misses
    # every lattice point; near each of the four tangents that happens on average
    # for a / 24 rows, so the mean estimate is pi - pi a^2 / 24 to leading order
    a = 0.04
    res = mc_design_estimate(Disk((0, 0), 1.0), a, CATALOG["corrected-cauchy"].weights, 20000, seed=3)
    assert res.bias == pytest.approx(-math.pi * a * a / 24, abs=4 * res.stderr)


def test_euler_on_annulus_and_ellipse():
    w = CATALOG["om-euler"].weights
    assert mc_design_estimate(Annulus((0, 0), 0.6, 1.0), 0.03, w, 40, seed=2).mean == pytest.approx(0, abs=0.05)
    assert mc_design_estimate(Ellipse((0, 0), (1.2, 0.7), 0.3), 0.03, w, 40, seed=2).mean == pytest.approx(1, abs=0.05)


@pytest.mark.parametrize("config, direction, expected", [
    (1, (1, 0), 0.0),
    (1, (1 / S2, 1 / S2), 1 / S2),
    (1, (-1, 0), 0.0),
    (3, (0, 1), 1.0),
    (6, (1, 1), 0.0),
    (7, (1 / S2, 1 / S2), 1 / S2),
])
def test_minus_h(config, direction, expected):
    assert minus_h(config, direction) == pytest.approx(expected)


def test_minus_h_needs_mixed_configuration():
    with pytest.raises(ValueError):
        minus_h(0, (1, 0))
    with pytest.raises(ValueError):
        class_boundary_density(6)


def test_boundary_constants_sum():
    # weights that are all one count every boundary cell; c3 coefficient sum
    assert boundary_constants().sum() == pytest.approx(4 * ((2 - S2) * 2 + 2 * S2 - 2))
    assert class_boundary_density(4) == pytest.approx(0.0, abs=1e-15)


def test_count_bound_from_image_and_histogram():
    disk = Disk((0, 0), 1.0)
    img = digitize_shape(disk, Lattice(0.05, (0.3, 0.4), 0.2))
    rep = count_bound_check(img, disk.v1)
    assert rep.holds
    rep2 = count_bound_check(config_histogram(img), disk.v1, a=0.05)
    assert rep2.counts == rep.counts
    with pytest.raises(ValueError):
        count_bound_check(config_histogram(img), disk.v1)
