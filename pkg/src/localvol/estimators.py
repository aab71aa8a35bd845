"""Weight catalog, estimator evaluation and predicted small-spacing behaviour."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boolean_model import BooleanModelSpec, series_terms, specific_volumes
from .config_algebra import WeightVector, series_constants, solve_weight_family
from .lattice_image import ConfigHistogram

SQRT2 = math.sqrt(2.0)
PI = math.pi
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class WeightCatalogEntry:
    name: str
    weights: WeightVector
    note: str

    @property
    def degree(self) -> int:
        return self.weights.degree


def dorst(theta: float = 1.0) -> WeightVector:
    return WeightVector(1, (0, 0, theta / 2, SQRT2 * theta, SQRT2 * theta / 2, 0))


def dorst_ab(alpha: float, beta: float) -> WeightVector:
    return WeightVector(1, (0, 0, alpha, 2 * beta, beta, 0))


# published members of the optimal families at w = 0
_OPT1_ANCHOR = tuple(PI / 16 * x for x in (0, 1 + SQRT2, SQRT2, 12 + 8 * SQRT2, 1 + SQRT2, 0))
_OPT2_ANCHOR = (0, 0.5, -1 / (2 * SQRT2), (0.75 + 1 / SQRT2) * (2 - PI), 0, 0)


def optimal_weights(degree: int, w: float = 0.0) -> WeightVector:
    """Member ``anchor + w * (0, 1, -sqrt2, -4 - 4 sqrt2, 1, 0)`` of the optimal family.

    The anchor is the published parametrization; it is checked against the
    solved family so a mismatch cannot go unnoticed.
    """
    anchor = {1: _OPT1_ANCHOR, 0: _OPT2_ANCHOR}.get(degree)
    if anchor is None:
        raise ValueError(f"optimal families exist for degree 0 or 1, got {degree}")
    particular, direction = solve_weight_family(degree)
    shift = np.array(anchor) - particular.array
    t = shift[1] / direction[2]
    if np.max(np.abs(shift - t * direction.array)) > 1e-12:
        raise AssertionError(f"published anchor is not in the degree-{degree} solution family")
    return WeightVector(degree, np.array(anchor) + w * direction.array)


_MS = np.array([0, SQRT2 / 4, 0.5, SQRT2 / 2, SQRT2 / 4, 0])

CATALOG: dict[str, WeightCatalogEntry] = {
    e.name: e for e in [
        WeightCatalogEntry("point-count", WeightVector(2, (0, 0.25, 0.5, 0.5, 0.75, 1)),
                           "number of foreground lattice points; unbiased area"),
        WeightCatalogEntry("om-v1", WeightVector(1, (0, PI / 16 * (1 + SQRT2 / 2), PI / 16 * (1 + SQRT2),
                                                     PI / 8, PI / 16 * (1 + SQRT2 / 2), 0)),
                           "Ohser-Muecklich discrete Cauchy projection"),
        WeightCatalogEntry("bieri-v1", WeightVector(1, (0, 0.5, 0.5, 1, 0.5, 0)),
                           "Bieri: perimeter of the union of pixel squares"),
        WeightCatalogEntry("corrected-cauchy", WeightVector(1, (0, PI / 8, PI / 8, PI / 4, PI / 8, 0)),
                           "Bieri weights rescaled by pi/4"),
        WeightCatalogEntry("dorst", dorst(1.0), "Dorst-Smeulders 8-adjacency, theta=1 (Freeman)"),
        WeightCatalogEntry("marching-squares", WeightVector(1, _MS), "marching squares contour"),
        WeightCatalogEntry("corrected-marching-squares",
                           WeightVector(1, _MS * PI / (4 * (2 * SQRT2 - 2))),
                           "marching squares rescaled to the correct limit"),
        WeightCatalogEntry("om-euler", WeightVector(0, (0, 0.25, 0, 0, -0.25, 0)),
                           "Ohser-Muecklich 6-neighbourhood Euler number"),
        WeightCatalogEntry("bieri-euler", WeightVector(0, (0, 0.25, 0, -0.5, -0.25, 0)),
                           "Bieri Euler number"),
        WeightCatalogEntry("opt1", optimal_weights(1), "optimal boundary-length family, w=0"),
        WeightCatalogEntry("opt2", optimal_weights(0), "optimal Euler family, w=0"),
    ]
}

ALIASES = {"optimal-v1": "opt1", "optimal-euler": "opt2", "freeman": "dorst"}


def lookup_weights(spec: str, degree: int | None = None, free: float = 0.0) -> WeightVector:
    """Resolve ``NAME``, ``dorst:THETA``, ``dorst-ab:ALPHA,BETA``, ``opt1[:W]``,
    ``opt2[:W]`` or six comma-separated numbers (then ``degree`` is required)."""
    name, _, arg = spec.partition(":")
    name = ALIASES.get(name.strip().lower(), name.strip().lower())
    if name == "dorst" and arg:
        w = dorst(float(arg))
    elif name == "dorst-ab":
        alpha, beta = (float(x) for x in arg.split(","))
        w = dorst_ab(alpha, beta)
    elif name in ("opt1", "opt2"):
        w = optimal_weights(1 if name == "opt1" else 0, float(arg) if arg else free)
    elif name in CATALOG:
        w = CATALOG[name].weights
    else:
        try:
            values = [float(x) for x in spec.split(",")]
        except ValueError:
            raise ValueError(f"unknown weights {spec!r}") from None
        if degree is None:
            raise ValueError("explicit weights need a degree")
        return WeightVector(degree, values)
    if degree is not None and degree != w.degree:
        raise ValueError(f"weights {spec!r} have degree {w.degree}, not {degree}")
    return w


# -- evaluation -------------------------------------------------------------------


def field_estimate(hist: ConfigHistogram, a: float, w: WeightVector) -> float:
    """Density estimate ``a**(i-2) * sum_j w_j N_j / N_0``."""
    if hist.n0 == 0:
        raise ValueError("histogram has no counted cells")
    return a ** (w.degree - 2) * float(np.dot(w.array, hist.class_counts)) / hist.n0


def design_estimate(hist: ConfigHistogram, a: float, w: WeightVector) -> float:
    """Absolute estimate ``a**i * sum_j w_j N_j`` of a compact set."""
    if w.degree in (0, 1) and (w[1] != 0 or w[6] != 0):
        raise ValueError("design-based estimates need w1 = w6 = 0")
    return a**w.degree * float(np.dot(w.array, hist.class_counts))


def swap_weights(w: WeightVector) -> WeightVector:
    """Weights that give on a set the estimate ``w`` gives on its complement."""
    w1, w2, w3, w4, w5, w6 = w.w
    return WeightVector(w.degree, (w6, w5, w3, w4, w2, w1))


def is_swap_invariant(w: WeightVector, tol: float = ZERO_TOL) -> bool:
    """Estimate unchanged by exchanging foreground and background."""
    return bool(np.allclose(w.array, swap_weights(w).array, rtol=0, atol=tol))


def is_swap_antisymmetric(w: WeightVector, tol: float = ZERO_TOL) -> bool:
    """Estimate negated by exchanging foreground and background."""
    return bool(np.allclose(w.array, -swap_weights(w).array, rtol=0, atol=tol))


# -- predicted asymptotics -----------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticsReport:
    """Small-spacing behaviour of ``E V_i - Vbar_i`` for a Boolean model.

    ``leading_bias_order`` is the power of ``a`` of the first nonvanishing
    term (negative when the mean diverges) and ``leading_bias_value`` its
    coefficient at the given model. When that term is of the
    ``c4 gamma + c5 x**2`` type with the gamma part matching the target,
    ``bias_coefficient`` is its dimensionless factor in front of
    ``x**2 e`` with ``x = gamma EV1 / pi`` and ``printed_factor`` the same
    factor in front of ``gamma**2 EV1**2 e / pi``.
    """

    degree: int
    limit_exists: bool
    limit_factor: float | None
    limit_value: float | None
    target: float
    leading_bias_order: int | None
    leading_bias_value: float
    bias_coefficient: float | None
    printed_factor: float | None


def predicted_asymptotics(w: WeightVector, spec: BooleanModelSpec) -> AsymptoticsReport:
    i = w.degree
    c = series_constants(w)
    t = series_terms(w, spec)
    target = specific_volumes(spec)[i]
    # E V_i = sum_k t_k a**(k + i - 2); remove the target from the a**0 term
    coeffs = {k + i - 2: float(t[k]) for k in range(4)}
    coeffs[0] = coeffs.get(0, 0.0) - target
    scale = max(1.0, abs(target))
    order = next((p for p in sorted(coeffs) if abs(coeffs[p]) > ZERO_TOL * scale), None)
    limit_exists = all(abs(coeffs[p]) <= ZERO_TOL * scale for p in coeffs if p < 0)
    limit_value = coeffs[0] + target if limit_exists else None

    bias_coef = printed = None
    if order is not None and order + 2 - i == 2:
        # bracket (c4 gamma + c5 x^2) e, minus the target for degree 0
        gamma_part = c[4] - (1.0 if i == 0 else 0.0)
        curv_part = c[5] + (math.pi if i == 0 else 0.0)
        if abs(gamma_part) <= ZERO_TOL:
            bias_coef = curv_part
            printed = curv_part / math.pi
    return AsymptoticsReport(
        degree=i,
        limit_exists=limit_exists,
        limit_factor=c[3] / math.pi if i == 1 else None,
        limit_value=limit_value,
        target=target,
        leading_bias_order=order,
        leading_bias_value=coeffs[order] if order is not None else 0.0,
        bias_coefficient=bias_coef,
        printed_factor=printed,
    )
