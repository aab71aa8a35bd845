"""Fixed smooth shapes observed on uniformly translated and rotated lattices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy import integrate

from .boolean_model import replicate_rng
from .config_algebra import CLASS_SIZES, REPRESENTATIVES, Configuration, WeightVector
from .lattice_image import BinaryImage, ConfigHistogram, Lattice, config_histogram


def ellipse_half_perimeter(a: float, b: float) -> float:
    """Half the circumference of an ellipse with semi-axes ``a`` and ``b``.

    Complete elliptic integral of the second kind via the arithmetic-geometric
    mean: ``L / 2 = pi / M(a, b) * (a^2 - sum_n 2^(n-1) c_n^2)`` with
    ``c_0^2 = a^2 - b^2``.
    """
    a, b = max(a, b), min(a, b)
    x, y = a, b
    total = (a * a - b * b) / 2
    power = 1.0
    while abs(x - y) > 1e-15 * x:
        c = (x - y) / 2
        x, y = (x + y) / 2, math.sqrt(x * y)
        total += power * c * c
        power *= 2
    return math.pi * (a * a - total) / x


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    R: float

    def contains(self, x, y):
        return (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2 <= self.R**2

    @property
    def v0(self) -> int:
        return 1

    @property
    def v1(self) -> float:
        return math.pi * self.R

    @property
    def bounds(self) -> tuple[tuple[float, float], float]:
        return self.center, self.R


@dataclass(frozen=True)
class Ellipse:
    center: tuple[float, float]
    semi_axes: tuple[float, float]
    tilt: float = 0.0

    def contains(self, x, y):
        ct, st = math.cos(self.tilt), math.sin(self.tilt)
        dx, dy = x - self.center[0], y - self.center[1]
        u = ct * dx + st * dy
        w = -st * dx + ct * dy
        p, q = self.semi_axes
        return (u / p) ** 2 + (w / q) ** 2 <= 1.0

    @property
    def v0(self) -> int:
        return 1

    @property
    def v1(self) -> float:
        return ellipse_half_perimeter(*self.semi_axes)

    @property
    def bounds(self):
        return self.center, max(self.semi_axes)


@dataclass(frozen=True)
class DiskUnion:
    disks: tuple[Disk, ...]

    def __post_init__(self):
        ds = self.disks
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                gap = math.dist(ds[i].center, ds[j].center) - ds[i].R - ds[j].R
                if not gap > 0:
                    raise ValueError(f"disks {i} and {j} are not disjoint")

    def contains(self, x, y):
        out = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        for d in self.disks:
            out |= d.contains(x, y)
        return out

    @property
    def v0(self) -> int:
        return len(self.disks)

    @property
    def v1(self) -> float:
        return math.pi * sum(d.R for d in self.disks)

    @property
    def bounds(self):
        xs = [d.center[0] for d in self.disks]
        ys = [d.center[1] for d in self.disks]
        c = ((min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2)
        return c, max(math.dist(c, d.center) + d.R for d in self.disks)


@dataclass(frozen=True)
class Annulus:
    center: tuple[float, float]
    R_in: float
    R_out: float

    def __post_init__(self):
        if not 0 < self.R_in < self.R_out:
            raise ValueError(f"annulus needs 0 < R_in < R_out, got {self.R_in}, {self.R_out}")

    def contains(self, x, y):
        d2 = (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2
        return (d2 <= self.R_out**2) & (d2 >= self.R_in**2)

    @property
    def v0(self) -> int:
        return 0

    @property
    def v1(self) -> float:
        return math.pi * (self.R_in + self.R_out)

    @property
    def bounds(self):
        return self.center, self.R_out


Shape = Union[Disk, Ellipse, DiskUnion, Annulus]


def shape_indicator(shape: Shape, x, y):
    """Closed-set membership, vectorized over coordinate arrays."""
    return shape.contains(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def reference_value(shape: Shape, degree: int) -> float:
    if degree == 0:
        return float(shape.v0)
    if degree == 1:
        return shape.v1
    raise ValueError(f"reference values exist for degree 0 or 1, got {degree}")


@dataclass(frozen=True)
class RandomLatticeDraw:
    c: tuple[float, float]
    v: float

    @classmethod
    def sample(cls, rng: np.random.Generator) -> RandomLatticeDraw:
        c = rng.random(2)
        return cls((float(c[0]), float(c[1])), float(rng.uniform(0.0, 2 * math.pi)))

    def lattice(self, a: float) -> Lattice:
        return Lattice(a, self.c, self.v)


def digitize_shape(shape: Shape, lattice: Lattice) -> BinaryImage:
    """Digitize ``shape`` on a possibly rotated lattice over a box holding ``shape + B(2a)``.

    Membership of ``a R_v(z + c)`` is decided by testing ``a (z + c)``
    against the shape rotated by ``-v``, so the grid itself stays axis-aligned.
    No window is attached: every cell is counted.
    """
    (cx, cy), rho = shape.bounds
    a = lattice.a
    u, w = lattice.coords(np.array([cx]), np.array([cy]))
    reach = (rho + 2 * a) / a
    i0, i1 = math.floor(u[0] - reach) - 1, math.ceil(u[0] + reach) + 1
    j0, j1 = math.floor(w[0] - reach) - 1, math.ceil(w[0] + reach) + 1
    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1))
    x, y = lattice.points(ii, jj)
    return BinaryImage.from_array(shape_indicator(shape, x, y), lattice, None, (i0, j0))


@dataclass
class DesignExperiment:
    estimates: np.ndarray
    reference: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.estimates))

    @property
    def stderr(self) -> float:
        n = len(self.estimates)
        return float(np.std(self.estimates, ddof=1) / math.sqrt(n)) if n > 1 else math.nan

    @property
    def bias(self) -> float:
        return self.mean - self.reference

    def __iter__(self):
        yield self.mean
        yield self.stderr


def _require_boundary_weights(w: WeightVector) -> None:
    if w.degree in (0, 1) and (w[1] != 0 or w[6] != 0):
        raise ValueError(
            "design-based estimates need w1 = w6 = 0: a compact set leaves infinitely many "
            "empty cells and the interior count diverges")


def design_histograms(shape: Shape, a: float, replicates: int, seed: int):
    """Configuration histograms of ``shape`` on independent random lattices."""
    for k in range(replicates):
        draw = RandomLatticeDraw.sample(replicate_rng(seed, k))
        yield config_histogram(digitize_shape(shape, draw.lattice(a)))


def mc_design_estimate(shape: Shape, a: float, w: WeightVector, replicates: int,
                       seed: int) -> DesignExperiment:
    """Mean of ``a**i * sum_j w_j N_j`` over stationary isotropic random lattices."""
    _require_boundary_weights(w)
    if not a > 0:
        raise ValueError(f"spacing must be positive, got {a}")
    est = np.array([a**w.degree * float(np.dot(w.array, h.class_counts))
                    for h in design_histograms(shape, a, replicates, seed)])
    ref = reference_value(shape, w.degree) if w.degree < 2 else math.nan
    return DesignExperiment(est, ref)


# -- support-function integrands ----------------------------------------------------------


def minus_h(config: int | Configuration, direction: Sequence[float]) -> float:
    """``max(0, min_{w in W} <w, n> - max_{b in B} <b, n>)`` for a configuration."""
    cfg = config if isinstance(config, Configuration) else Configuration(int(config))
    black, white = cfg.black, cfg.white
    if not black or not white:
        raise ValueError("configuration needs both black and white vertices")
    n0, n1 = direction
    lo = min(x * n0 + y * n1 for x, y in white)
    hi = max(x * n0 + y * n1 for x, y in black)
    return max(0.0, lo - hi)


def class_boundary_density(class_id: int) -> float:
    """Integral of :func:`minus_h` of the class representative over all directions."""
    if class_id not in (2, 3, 4, 5):
        raise ValueError(f"class must be one of 2..5, got {class_id}")
    rep = REPRESENTATIVES[class_id - 1]
    f = lambda v: minus_h(rep, (math.cos(v), math.sin(v)))  # noqa: E731
    # kinks sit at multiples of pi/4
    total = 0.0
    for k in range(8):
        val, _ = integrate.quad(f, k * math.pi / 4, (k + 1) * math.pi / 4, epsabs=1e-13, epsrel=1e-13)
        total += val
    return total


def boundary_constants() -> np.ndarray:
    """``d_j * I_j`` for classes 2..5; these are the w-coefficients of c_3."""
    return np.array([CLASS_SIZES[j - 1] * class_boundary_density(j) for j in (2, 3, 4, 5)])


# -- configuration-count bound ---------------------------------------------------------------


@dataclass(frozen=True)
class CountBoundReport:
    bound: float
    counts: tuple[int, int, int, int]

    @property
    def margins(self) -> tuple[float, ...]:
        return tuple(self.bound - n for n in self.counts)

    @property
    def holds(self) -> bool:
        return all(m >= 0 for m in self.margins)


def count_bound_check(image: BinaryImage | ConfigHistogram, v1_reference: float,
                      a: float | None = None) -> CountBoundReport:
    """Compare N_2..N_5 with ``(1 + 4 sqrt(2) V1) / a``."""
    if isinstance(image, BinaryImage):
        a = image.lattice.a if a is None else a
        hist = config_histogram(image)
    else:
        if a is None:
            raise ValueError("spacing is required when passing a histogram")
        hist = image
    bound = (1 + 4 * math.sqrt(2) * v1_reference) / a
    cc = hist.class_counts
    return CountBoundReport(bound, tuple(int(n) for n in cc[1:5]))
