"""Configurations of the 2x2 lattice cell and the linear algebra built on them.

Vertex ``x_i`` carries bit ``2**i`` of the configuration index::

    x2=(0,1)  x3=(1,1)
    x0=(0,0)  x1=(1,0)

Class ids run 1..6 as in the usual table (empty, one black, two adjacent,
two opposite, three black, full).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .geometry import convex_hull_metrics, intrinsic_power_volume

SQRT2 = math.sqrt(2.0)

VERTICES: tuple[tuple[int, int], ...] = ((0, 0), (1, 0), (0, 1), (1, 1))

CLASS_MEMBERS: dict[int, tuple[int, ...]] = {
    1: (0,),
    2: (1, 2, 4, 8),
    3: (3, 5, 10, 12),
    4: (6, 9),
    5: (7, 11, 13, 14),
    6: (15,),
}
CLASS_SIZES = np.array([1, 4, 4, 2, 4, 1])
REPRESENTATIVES = (0, 1, 3, 6, 7, 15)

_CLASS_OF = np.empty(16, dtype=np.int64)
for _cid, _members in CLASS_MEMBERS.items():
    _CLASS_OF[list(_members)] = _cid
CLASS_OF_INDEX = _CLASS_OF
"""Class id of every configuration index, as an array of length 16."""


class ConsistencyError(RuntimeError):
    """Two computations that must agree do not; signals an implementation bug."""


@dataclass(frozen=True)
class Configuration:
    index: int

    def __post_init__(self):
        if not 0 <= self.index <= 15:
            raise ValueError(f"configuration index must be in 0..15, got {self.index}")

    @property
    def black(self) -> tuple[tuple[int, int], ...]:
        return tuple(v for i, v in enumerate(VERTICES) if self.index >> i & 1)

    @property
    def white(self) -> tuple[tuple[int, int], ...]:
        return tuple(v for i, v in enumerate(VERTICES) if not self.index >> i & 1)

    @property
    def class_id(self) -> int:
        return config_class(self.index)


@dataclass(frozen=True)
class WeightVector:
    """Six class weights for an estimator of the intrinsic volume of degree 0, 1 or 2."""

    degree: int
    w: tuple[float, ...]

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise ValueError(f"degree must be 0, 1 or 2, got {self.degree}")
        w = tuple(float(x) for x in self.w)
        if len(w) != 6:
            raise ValueError(f"expected 6 weights, got {len(w)}")
        if not all(math.isfinite(x) for x in w):
            raise ValueError(f"weights must be finite, got {w}")
        object.__setattr__(self, "w", w)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.w)

    def __getitem__(self, j: int) -> float:
        """1-based access, ``wv[2]`` is the weight of class 2."""
        if not 1 <= j <= 6:
            raise IndexError(j)
        return self.w[j - 1]

    def __add__(self, other: WeightVector) -> WeightVector:
        return WeightVector(self.degree, self.array + other.array)

    def scaled(self, s: float) -> WeightVector:
        return WeightVector(self.degree, s * self.array)


def config_index(black: Iterable[Sequence[int]]) -> int:
    """Index of the configuration whose black vertices are ``black``."""
    index = 0
    for v in black:
        v = (int(v[0]), int(v[1]))
        if v not in VERTICES:
            raise ValueError(f"{v} is not a vertex of the unit cell")
        index |= 1 << VERTICES.index(v)
    return index


def config_class(index: int) -> int:
    if not 0 <= index <= 15:
        raise ValueError(f"configuration index must be in 0..15, got {index}")
    return int(_CLASS_OF[index])


def class_points(class_id: int) -> tuple[tuple[int, int], ...]:
    """Black vertices of the class representative."""
    return Configuration(REPRESENTATIVES[class_id - 1]).black


@lru_cache(maxsize=None)
def _mobius() -> np.ndarray:
    b = np.zeros((6, 6), dtype=np.int64)
    for j, rep in enumerate(REPRESENTATIVES):
        white = 15 - rep
        black_bits = [1 << i for i in range(4) if rep >> i & 1]
        # P(W vacant, B covered) = sum over S in B of (-1)^|S| P(W u S vacant)
        for k in range(len(black_bits) + 1):
            for subset in itertools.combinations(black_bits, k):
                vacant = white | sum(subset)
                b[config_class(vacant) - 1, j] += (-1) ** k
    b.setflags(write=False)
    return b


def mobius_matrix() -> np.ndarray:
    """Integer 6x6 matrix B with ``p_obs[j] = sum_i B[i, j] * p_vac[i]``.

    Column j is the observed class, row i the class of the vacant point set.
    """
    return _mobius().copy()


@lru_cache(maxsize=None)
def _coefficients() -> np.ndarray:
    a = np.zeros((8, 6))
    a[0, 0] = 1.0
    a[1, 1:] = 1.0
    for j in range(1, 6):
        pts = class_points(j + 1)
        m = convex_hull_metrics(pts)
        v13 = intrinsic_power_volume(pts, 3) if len(pts) >= 2 else 0.0
        a[2, j] = -2.0 * m.v1
        a[3, j] = -m.v2
        a[4, j] = 2.0 * m.v1**2
        a[5, j] = v13
        a[6, j] = 2.0 * m.v1 * m.v2
        a[7, j] = -4.0 / 3.0 * m.v1**3
    a.setflags(write=False)
    return a


def coefficient_matrix() -> np.ndarray:
    """8x6 matrix A whose column j holds the expansion constants of the
    vacancy probability of the class-j representative."""
    return _coefficients().copy()


@dataclass(frozen=True)
class SeriesConstants:
    c: tuple[float, ...]

    def __getitem__(self, m: int) -> float:
        """1-based, ``sc[3]`` is c_3."""
        if not 1 <= m <= 8:
            raise IndexError(m)
        return self.c[m - 1]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.c)


def _closed_form_constants(w: np.ndarray) -> np.ndarray:
    w1, w2, w3, w4, w5, w6 = w
    s = SQRT2
    return np.array([
        w6,
        w1 - w6,
        4 * (-w1 + (2 - s) * w2 + (-2 + 2 * s) * w3 + (2 - s) * w5 - w6),
        -w1 + 2 * w2 - 2 * w5 + w6,
        4 * (2 * w1 + (-5 + 2 * s) * w2 + (4 - 4 * s) * w3 + (3 - 2 * s) * w4
             + (-7 + 6 * s) * w5 + (3 - 2 * s) * w6),
        (w1 + (2 * s - 2) * w2 + (2 - 4 * s) * w3 + (2 * s - 2) * w5 + w6) / 6,
        2 * (2 * w1 + (-6 + s) * w2 + (4 - 2 * s) * w3 + (2 - s) * w4
             + (-2 + 3 * s) * w5 - s * w6),
        4 / 3 * (-8 * w1 + (22 - 7 * s) * w2 + (-16 + 14 * s) * w3 + (-6 + 3 * s) * w4
                 + (10 - 13 * s) * w5 + (-2 + 3 * s) * w6),
    ])


def constants_by_matrix(w: WeightVector | Sequence[float]) -> np.ndarray:
    """c = A B D w."""
    wa = w.array if isinstance(w, WeightVector) else np.asarray(w, dtype=float)
    return _coefficients() @ _mobius() @ (CLASS_SIZES * wa)


def series_constants(w: WeightVector | Sequence[float]) -> SeriesConstants:
    """Expansion constants c_1..c_8 of the mean of the estimator with weights ``w``."""
    wa = w.array if isinstance(w, WeightVector) else np.asarray(w, dtype=float)
    closed = _closed_form_constants(wa)
    product = constants_by_matrix(wa)
    scale = max(1.0, float(np.max(np.abs(wa))))
    if np.max(np.abs(closed - product)) > 1e-9 * scale:
        raise ConsistencyError(f"A.B.D.w = {product} disagrees with closed form {closed}")
    return SeriesConstants(tuple(float(x) for x in closed))


# -- constraint systems ------------------------------------------------------------

W13_ROW = np.array([-5 + 2 * SQRT2, 4 - 4 * SQRT2, 3 - 2 * SQRT2, -7 + 6 * SQRT2])
W21_ROW = np.array([2 - SQRT2, -2 + 2 * SQRT2, 0.0, 2 - SQRT2])

CONSTRAINT_TOL = 1e-9


@dataclass(frozen=True)
class ConstraintReport:
    degree: int
    residuals: dict[str, float]
    passed: dict[str, bool] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "residuals", {k: float(v) for k, v in self.residuals.items()})
        object.__setattr__(
            self, "passed", {k: abs(v) <= CONSTRAINT_TOL for k, v in self.residuals.items()})

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


def constraint_report(w: WeightVector) -> ConstraintReport:
    """Residuals of the linear conditions for asymptotic unbiasedness.

    Degree 1: ``w10`` (w1 = w6 = 0), ``w11`` (c3 = pi), ``w12`` (w2 = w5) and
    ``w13``. Degree 0: ``w20``, ``w21``, ``w22`` (2 w2 - 2 w5 = 1) and ``w23``.
    Degree 2: ``w1`` (w1 = 0) and ``w6`` (w6 = 1).
    """
    w1, w2, w3, w4, w5, w6 = w.w
    inner = np.array([w2, w3, w4, w5])
    if w.degree == 1:
        res = {
            "w10": max(abs(w1), abs(w6)),
            "w11": series_constants(w)[3] - math.pi,
            "w12": w2 - w5,
            "w13": float(W13_ROW @ inner),
        }
    elif w.degree == 0:
        res = {
            "w20": max(abs(w1), abs(w6)),
            "w21": float(W21_ROW @ inner),
            "w22": 2 * w2 - 2 * w5 - 1.0,
            "w23": float(W13_ROW @ inner) + math.pi / 4,
        }
    else:
        res = {"w1": w1, "w6": w6 - 1.0}
    return ConstraintReport(w.degree, res)


def _system(degree: int) -> tuple[np.ndarray, np.ndarray]:
    # unknowns (w2, w3, w4, w5); w1 = w6 = 0 is imposed by construction
    if degree == 1:
        m = np.array([4 * W21_ROW, [1.0, 0.0, 0.0, -1.0], W13_ROW])
        rhs = np.array([math.pi, 0.0, 0.0])
    elif degree == 0:
        m = np.array([W21_ROW, [2.0, 0.0, 0.0, -2.0], W13_ROW])
        rhs = np.array([0.0, 1.0, -math.pi / 4])
    else:
        raise ValueError(f"weight families exist for degree 0 or 1, got {degree}")
    return m, rhs


def solve_weight_family(degree: int) -> tuple[WeightVector, WeightVector]:
    """All weights that make the degree-``degree`` estimator asymptotically
    unbiased with the fastest attainable rate for ball-grain Boolean models.

    Returns ``(particular, direction)``. The particular solution is the one
    with ``w5 = 0`` and the direction is scaled to ``w2 = 1``; every
    ``particular + t * direction`` solves the system.
    """
    m, rhs = _system(degree)
    direction = scipy.linalg.null_space(m)
    if direction.shape[1] != 1:
        raise ConsistencyError(f"expected a 1-dimensional solution family, got {direction.shape[1]}")
    direction = direction[:, 0] / direction[0, 0]
    sol, _, rank, _ = scipy.linalg.lstsq(m, rhs)
    if rank != 3 or np.max(np.abs(m @ sol - rhs)) > 1e-12:
        raise ConsistencyError("weight system is inconsistent")
    sol = sol - sol[3] / direction[3] * direction
    pad = lambda v: (0.0, *v, 0.0)  # noqa: E731
    return WeightVector(degree, pad(sol)), WeightVector(degree, pad(direction))
