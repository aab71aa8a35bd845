"""Stationary isotropic Boolean models with disk grains.

Exact oracles (vacancy and class probabilities, estimator means at finite
spacing), the truncated small-spacing expansion, and a Monte Carlo simulator
that digitizes realizations on an axis-aligned lattice.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config_algebra import (
    CLASS_SIZES, REPRESENTATIVES, ConsistencyError, Configuration, WeightVector,
    mobius_matrix, series_constants,
)
from .geometry import union_of_disks_area
from .lattice_image import BinaryImage, Lattice, Window, config_histogram

GAUSS_NODES = 32


@dataclass(frozen=True)
class RadiusLaw:
    """Point mass at ``lo`` (``hi`` is None) or uniform on ``[lo, hi]``."""

    lo: float
    hi: float | None = None

    def __post_init__(self):
        if not self.lo > 0:
            raise ValueError(f"radii must be bounded below by a positive epsilon, got {self.lo}")
        if self.hi is not None and not self.hi > self.lo:
            raise ValueError(f"uniform radius law needs hi > lo, got [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, r: float) -> RadiusLaw:
        return cls(r)

    @classmethod
    def uniform(cls, lo: float, hi: float) -> RadiusLaw:
        return cls(lo, hi)

    @property
    def kind(self) -> str:
        return "point" if self.hi is None else "uniform"

    @property
    def eps(self) -> float:
        return self.lo

    @property
    def r_max(self) -> float:
        return self.lo if self.hi is None else self.hi

    @property
    def mean(self) -> float:
        return self.lo if self.hi is None else (self.lo + self.hi) / 2

    @property
    def second_moment(self) -> float:
        if self.hi is None:
            return self.lo**2
        return (self.lo**2 + self.lo * self.hi + self.hi**2) / 3

    @property
    def inverse_mean(self) -> float:
        if self.hi is None:
            return 1 / self.lo
        return math.log(self.hi / self.lo) / (self.hi - self.lo)

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        """Radii and probability weights for expectations over the law."""
        if self.hi is None:
            return np.array([self.lo]), np.array([1.0])
        x, w = np.polynomial.legendre.leggauss(GAUSS_NODES)
        half = (self.hi - self.lo) / 2
        return self.lo + half * (x + 1), w / 2

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.hi is None:
            return np.full(n, self.lo)
        return rng.uniform(self.lo, self.hi, n)

    def __str__(self):
        return f"{self.lo:g}" if self.hi is None else f"{self.lo:g}:{self.hi:g}"


@dataclass(frozen=True)
class BooleanModelSpec:
    gamma: float
    law: RadiusLaw

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"intensity must be positive, got {self.gamma}")

    @property
    def ev1(self) -> float:
        """Mean half perimeter of a grain."""
        return math.pi * self.law.mean

    @property
    def ev2(self) -> float:
        """Mean grain area."""
        return math.pi * self.law.second_moment


@dataclass(frozen=True)
class SpecificVolumes:
    v0: float
    v1: float
    v2: float

    def __getitem__(self, i: int) -> float:
        return (self.v0, self.v1, self.v2)[i]


def specific_volumes(spec: BooleanModelSpec) -> SpecificVolumes:
    g = spec.gamma
    e = math.exp(-g * spec.ev2)
    return SpecificVolumes(
        v0=(g - (g * spec.ev1) ** 2 / math.pi) * e,
        v1=g * spec.ev1 * e,
        v2=1 - e,
    )


# -- exact oracle --------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _mean_union_area(index: int, a: float, law: RadiusLaw) -> float:
    pts = [(a * x, a * y) for x, y in Configuration(index).black]
    if not pts:
        return 0.0
    radii, weights = law.quadrature()
    return float(sum(w * union_of_disks_area(pts, r) for r, w in zip(radii, weights)))


def vacancy_probability(config: int | Configuration, a: float, spec: BooleanModelSpec) -> float:
    """Probability that the scaled configuration ``a * xi`` misses the model."""
    if not a > 0:
        raise ValueError(f"spacing must be positive, got {a}")
    index = config.index if isinstance(config, Configuration) else int(config)
    return math.exp(-spec.gamma * _mean_union_area(index, float(a), spec.law))


def exact_class_probabilities(a: float, spec: BooleanModelSpec) -> np.ndarray:
    """Probability ``p_j`` of one fixed configuration of each class j = 1..6."""
    vac = np.array([vacancy_probability(rep, a, spec) for rep in REPRESENTATIVES])
    p = mobius_matrix().T @ vac
    if np.any(p < -1e-10):
        raise ConsistencyError(f"negative configuration probability {p} at a={a}")
    return p


def exact_estimator_mean(w: WeightVector, a: float, spec: BooleanModelSpec) -> float:
    """Mean of ``a**(i-2) * sum_j w_j N_j / N_0`` at spacing ``a``."""
    p = exact_class_probabilities(a, spec)
    return a ** (w.degree - 2) * float(np.sum(w.array * CLASS_SIZES * p))


def series_terms(w: WeightVector, spec: BooleanModelSpec) -> np.ndarray:
    """Coefficients ``t_k`` with ``a**(2-i) E V_i = t_0' + sum_k t_k a**k``.

    Entry 0 holds the constant ``c_1 + c_2 e``; entries 1..3 the coefficients
    of ``a``, ``a**2`` and ``a**3``; every bracket already carries the factor
    ``e = exp(-gamma EV2)``.
    """
    c = series_constants(w)
    g = spec.gamma
    x = g / math.pi * spec.ev1
    e = math.exp(-g * spec.ev2)
    return np.array([
        c[1] + c[2] * e,
        c[3] * x * e,
        (c[4] * g + c[5] * x**2) * e,
        (c[6] * g * spec.law.inverse_mean + c[7] * g**2 / math.pi * spec.ev1 + c[8] * x**3) * e,
    ])


def series_estimator_mean(w: WeightVector, a: float, spec: BooleanModelSpec, order: int = 3) -> float:
    """Small-spacing expansion of the estimator mean truncated after ``a**order``."""
    if not 0 <= order <= 3:
        raise ValueError(f"order must be 0..3, got {order}")
    if not (a > 0 and a * math.sqrt(2) < spec.law.eps):
        raise ValueError(
            f"expansion needs sqrt(2) a < min radius, got a={a}, eps={spec.law.eps}")
    t = series_terms(w, spec)
    return a ** (w.degree - 2) * float(sum(t[k] * a**k for k in range(order + 1)))


# -- simulation -------------------------------------------------------------------------


@dataclass
class Realization:
    centers: np.ndarray
    radii: np.ndarray
    window: Window

    def __len__(self):
        return len(self.radii)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for (cx, cy), r in zip(self.centers, self.radii):
            out |= (x - cx) ** 2 + (y - cy) ** 2 <= r * r
        return out


def dilated_area(window: Window, r: float) -> float:
    return window.area + 2 * (window.width + window.height) * r + math.pi * r * r


def _in_dilated(window: Window, r: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    dx = np.maximum(np.maximum(window.x0 - x, x - window.x1), 0.0)
    dy = np.maximum(np.maximum(window.y0 - y, y - window.y1), 0.0)
    return dx * dx + dy * dy <= r * r


def sample_realization(spec: BooleanModelSpec, window: Window, rng: np.random.Generator) -> Realization:
    """Poisson grains whose centers fall in the window dilated by the largest
    radius, so the union restricted to the window has the stationary law."""
    r = spec.law.r_max
    n = rng.poisson(spec.gamma * dilated_area(window, r))
    centers = np.empty((0, 2))
    box = (window.x0 - r, window.y0 - r, window.x1 + r, window.y1 + r)
    while len(centers) < n:
        m = 2 * (n - len(centers)) + 16
        x = rng.uniform(box[0], box[2], m)
        y = rng.uniform(box[1], box[3], m)
        keep = _in_dilated(window, r, x, y)
        centers = np.concatenate([centers, np.column_stack([x[keep], y[keep]])])
    centers = centers[:n]
    return Realization(centers, spec.law.sample(rng, n), window)


def rasterize(real: Realization, lattice: Lattice) -> BinaryImage:
    """Digitize a realization on an axis-aligned lattice over its window."""
    if lattice.v != 0.0:
        raise ValueError("rasterize expects an axis-aligned lattice")
    w = real.window
    a, (cx, cy) = lattice.a, lattice.c
    if w.width < a or w.height < a:
        raise ValueError(f"window {w} cannot hold a lattice cell of spacing {a}")
    i0, i1 = math.floor(w.x0 / a - cx) - 1, math.ceil(w.x1 / a - cx) + 1
    j0, j1 = math.floor(w.y0 / a - cy) - 1, math.ceil(w.y1 / a - cy) + 1
    xs = a * (np.arange(i0, i1 + 1) + cx)
    ys = a * (np.arange(j0, j1 + 1) + cy)
    bits = np.zeros((len(ys), len(xs)), dtype=bool)
    for (gx, gy), r in zip(real.centers, real.radii):
        lo_i = max(math.ceil((gx - r) / a - cx) - i0, 0)
        hi_i = min(math.floor((gx + r) / a - cx) - i0 + 1, len(xs))
        lo_j = max(math.ceil((gy - r) / a - cy) - j0, 0)
        hi_j = min(math.floor((gy + r) / a - cy) - j0 + 1, len(ys))
        if lo_i >= hi_i or lo_j >= hi_j:
            continue
        dx = (xs[lo_i:hi_i] - gx) ** 2
        dy = (ys[lo_j:hi_j] - gy) ** 2
        bits[lo_j:hi_j, lo_i:hi_i] |= dy[:, None] + dx[None, :] <= r * r
    return BinaryImage.from_array(bits, lattice, w, (i0, j0))


def replicate_rng(seed: int, k: int) -> np.random.Generator:
    """Independent counter-based stream for replicate ``k`` of run ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, k])))


@dataclass
class FieldExperiment:
    estimates: np.ndarray
    class_frequencies: np.ndarray = field(repr=False)
    """Per replicate ``N_j / (d_j N_0)``, comparable to the class probabilities."""

    @property
    def mean(self) -> float:
        return float(np.mean(self.estimates))

    @property
    def stderr(self) -> float:
        n = len(self.estimates)
        return float(np.std(self.estimates, ddof=1) / math.sqrt(n)) if n > 1 else math.nan

    def __iter__(self):
        yield self.mean
        yield self.stderr


def _field_replicate(args) -> tuple[float, np.ndarray]:
    spec, a, window, w, seed, k = args
    rng = replicate_rng(seed, k)
    real = sample_realization(spec, window, rng)
    hist = config_histogram(rasterize(real, Lattice(a)))
    if hist.n0 == 0:
        raise ValueError(f"window {window} holds no complete lattice cell at spacing {a}")
    counts = hist.class_counts
    est = a ** (w.degree - 2) * float(np.dot(w.array, counts)) / hist.n0
    return est, counts / (CLASS_SIZES * hist.n0)


def mc_field_experiment(spec: BooleanModelSpec, a: float, window: Window, w: WeightVector,
                        replicates: int, seed: int, workers: int = 1) -> FieldExperiment:
    """Monte Carlo mean of the density estimator over independent realizations.

    Unpacks as ``(mean, stderr)``; per-replicate values are kept on the result.
    """
    if window.width < 2 * a or window.height < 2 * a:
        raise ValueError(f"window {window} too small for spacing {a}")
    jobs = [(spec, a, window, w, seed, k) for k in range(replicates)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_field_replicate, jobs, chunksize=8))
    else:
        results = [_field_replicate(job) for job in jobs]
    est = np.array([r[0] for r in results])
    freqs = np.array([r[1] for r in results]).reshape(len(results), 6)
    return FieldExperiment(est, freqs)
