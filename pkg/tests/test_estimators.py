from __future__ import annotations

import math

import numpy as np
import pytest

from localvol.boolean_model import BooleanModelSpec, RadiusLaw, exact_estimator_mean, specific_volumes
from localvol.config_algebra import WeightVector, constraint_report
from localvol.estimators import (
    CATALOG, design_estimate, dorst, dorst_ab, field_estimate, is_swap_antisymmetric,
    is_swap_invariant, lookup_weights, optimal_weights, predicted_asymptotics, swap_weights,
)
from localvol.lattice_image import BinaryImage, ConfigHistogram, config_histogram

SPEC = BooleanModelSpec(0.3, RadiusLaw.point(1.0))


def test_catalog_degrees():
    degrees = {name: e.degree for name, e in CATALOG.items()}
    assert degrees["point-count"] == 2
    assert degrees["om-euler"] == degrees["bieri-euler"] == degrees["opt2"] == 0
    assert all(d == 1 for n, d in degrees.items() if n not in ("point-count", "om-euler", "bieri-euler", "opt2"))


def test_lookup_forms():
    assert lookup_weights("freeman") == CATALOG["dorst"].weights
    assert lookup_weights("dorst:2").w == dorst(2.0).w
    assert lookup_weights("dorst-ab:0.5,0.7").w == dorst_ab(0.5, 0.7).w
    assert lookup_weights("opt1:1.5").w == optimal_weights(1, 1.5).w
    assert lookup_weights("optimal-euler", free=-1.0).w == optimal_weights(0, -1.0).w
    assert lookup_weights("0,1,2,3,4,0", degree=1).w == (0, 1, 2, 3, 4, 0)


@pytest.mark.parametrize("spec, degree", [("nonsense", None), ("0,1,2,3,4,0", None), ("om-v1", 0)])
def test_lookup_errors(spec, degree):
    with pytest.raises(ValueError):
        lookup_weights(spec, degree)


def test_optimal_members_satisfy_constraints():
    for degree in (0, 1):
        for w in (-2.0, 0.3, 4.0):
            assert constraint_report(optimal_weights(degree, w)).all_passed
    with pytest.raises(ValueError):
        optimal_weights(2)


def test_swap_symmetries():
    assert is_swap_invariant(CATALOG["corrected-cauchy"].weights)
    assert is_swap_antisymmetric(CATALOG["om-euler"].weights)
    assert not is_swap_antisymmetric(CATALOG["bieri-euler"].weights)
    w = WeightVector(1, (1, 2, 3, 4, 5, 6))
    assert swap_weights(swap_weights(w)) == w


def test_swapped_weights_on_complement():
    bits = np.random.default_rng(0).random((40, 60)) < 0.4
    img = BinaryImage.from_array(bits)
    w = WeightVector(0, (0.1, 0.2, 0.3, 0.4, 0.5, 0.6))
    direct = field_estimate(config_histogram(img), 0.5, w)
    swapped = field_estimate(config_histogram(img.complement()), 0.5, swap_weights(w))
    assert swapped == pytest.approx(direct, rel=1e-14)


def test_point_count_counts_points_by_cell_membership():
    bits = np.random.default_rng(1).random((30, 30)) < 0.5
    hist = config_histogram(BinaryImage.from_array(bits))
    # a point lies in 4 cells inside, 2 on an edge and 1 at a corner
    mult = np.full(30, 2)
    mult[[0, -1]] = 1
    expected = (bits * np.outer(mult, mult)).sum() / 4
    w = CATALOG["point-count"].weights
    assert field_estimate(hist, 1.0, w) * hist.n0 == pytest.approx(expected, rel=1e-14)


def test_estimate_errors():
    with pytest.raises(ValueError):
        field_estimate(ConfigHistogram(np.zeros(16)), 1.0, CATALOG["om-v1"].weights)
    hist = ConfigHistogram(np.ones(16))
    with pytest.raises(ValueError):
        design_estimate(hist, 1.0, WeightVector(0, (1, 0, 0, 0, 0, 0)))
    assert design_estimate(hist, 0.5, CATALOG["om-euler"].weights) == pytest.approx(0.0)


def test_asymptotics_of_point_count_is_exact():
    rep = predicted_asymptotics(CATALOG["point-count"].weights, SPEC)
    assert rep.leading_bias_order is None and rep.limit_exists
    assert rep.limit_value == pytest.approx(specific_volumes(SPEC).v2)


def test_asymptotics_orders():
    assert predicted_asymptotics(CATALOG["opt1"].weights, SPEC).leading_bias_order == 2
    assert predicted_asymptotics(CATALOG["opt2"].weights, SPEC).leading_bias_order == 1
    assert predicted_asymptotics(CATALOG["om-v1"].weights, SPEC).leading_bias_order == 1
    bieri = predicted_asymptotics(CATALOG["bieri-v1"].weights, SPEC)
    assert bieri.leading_bias_order == 0 and bieri.bias_coefficient is None
    assert bieri.limit_value == pytest.approx(4 / math.pi * specific_volumes(SPEC).v1)


def test_interior_weights_diverge():
    rep = predicted_asymptotics(WeightVector(1, (1, 0, 0, 0, 0, 0)), SPEC)
    assert not rep.limit_exists and rep.leading_bias_order == -1


def test_printed_factor_is_model_free():
    other = BooleanModelSpec(1.1, RadiusLaw.uniform(0.4, 2.0))
    for name in ("om-v1", "corrected-marching-squares", "om-euler", "bieri-euler"):
        w = CATALOG[name].weights
        assert predicted_asymptotics(w, other).printed_factor == pytest.approx(
            predicted_asymptotics(w, SPEC).printed_factor, abs=1e-12)


def test_field_estimate_hand_examples():
    full = ConfigHistogram(np.eye(16, dtype=int)[15] * 50)
    assert field_estimate(full, 0.3, CATALOG["point-count"].weights) == pytest.approx(1.0)
    empty = ConfigHistogram(np.eye(16, dtype=int)[0] * 50)
    assert field_estimate(empty, 0.3, CATALOG["om-v1"].weights) == 0.0
    n = np.zeros(16, dtype=int)
    n[1], n[3], n[7], n[0] = 4, 8, 4, 84
    assert field_estimate(ConfigHistogram(n), 0.5, CATALOG["corrected-cauchy"].weights) == pytest.approx(math.pi / 25)


def test_single_pixel_has_euler_number_one():
    bits = np.zeros((5, 5), bool)
    bits[2, 2] = True
    hist = config_histogram(BinaryImage.from_array(bits))
    assert list(hist.class_counts[1:5]) == [4, 0, 0, 0]
    assert design_estimate(hist, 0.1, CATALOG["om-euler"].weights) == pytest.approx(1.0)


def test_dorst_swap():
    theta = 1.7
    s2 = math.sqrt(2)
    assert swap_weights(dorst(theta)).w == pytest.approx((0, s2 * theta / 2, theta / 2, s2 * theta, 0, 0))
    assert not is_swap_invariant(dorst(theta))


def test_limit_factor_matches_exact_extrapolation():
    w = CATALOG["marching-squares"].weights
    rep = predicted_asymptotics(w, SPEC)
    # Richardson step removes the linear term of the exact mean
    m1, m2 = exact_estimator_mean(w, 0.02, SPEC), exact_estimator_mean(w, 0.01, SPEC)
    assert 2 * m2 - m1 == pytest.approx(rep.limit_value, abs=1e-4)
    assert rep.limit_value == pytest.approx(rep.limit_factor * specific_volumes(SPEC).v1)
