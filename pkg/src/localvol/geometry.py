"""Exact planar geometry for small point sets and equal-radius disks.

Points are plain ``(x, y)`` pairs. Everything here is a pure function.
"""
from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

Point = tuple[float, float]


class HullMetrics(NamedTuple):
    """Intrinsic volumes of a convex hull: Euler characteristic, half perimeter, area."""

    v0: int
    v1: float
    v2: float


def _as_points(points: Iterable[Sequence[float]]) -> list[Point]:
    return [(float(p[0]), float(p[1])) for p in points]


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]]) -> list[Point]:
    """Counter-clockwise hull vertices (monotone chain), collinear points dropped.

    A hull of dimension 1 is returned as its two endpoints.
    """
    pts = sorted(set(_as_points(points)))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 or _polygon_area(hull) == 0.0:
        return [pts[0], pts[-1]]
    return hull


def _polygon_area(poly: Sequence[Point]) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(poly, list(poly[1:]) + [poly[0]]):
        s += x0 * y1 - x1 * y0
    return abs(s) / 2.0


def _hull_edges(hull: Sequence[Point]) -> list[float]:
    if len(hull) < 2:
        return []
    if len(hull) == 2:
        return [math.dist(hull[0], hull[1])]
    return [math.dist(p, q) for p, q in zip(hull, list(hull[1:]) + [hull[0]])]


def convex_hull_metrics(points: Iterable[Sequence[float]]) -> HullMetrics:
    """V0, V1 and V2 of ``conv(points)``.

    V1 is half the boundary length, so a segment of length L has V1 = L.
    """
    hull = convex_hull(points)
    if not hull:
        return HullMetrics(0, 0.0, 0.0)
    edges = _hull_edges(hull)
    if len(hull) <= 2:
        return HullMetrics(1, sum(edges), 0.0)
    return HullMetrics(1, sum(edges) / 2.0, _polygon_area(hull))


def intrinsic_power_volume(points: Iterable[Sequence[float]], m: int) -> float:
    """Intrinsic power volume of order ``m`` of a finite point set.

    Sums ``gamma(F) * length(F)**m`` over the 1-faces of the hull, with outer
    angle 1 for a segment hull and 1/2 for each edge of a polygon, and divides
    by ``m * 2**(m - 1)``.
    """
    if m < 3 or m % 2 == 0:
        raise ValueError(f"order m must be an odd integer >= 3, got {m}")
    hull = convex_hull(points)
    if len(hull) < 2:
        raise ValueError("intrinsic power volume needs at least 2 distinct points")
    edges = _hull_edges(hull)
    angle = 1.0 if len(hull) == 2 else 0.5
    return angle * sum(e**m for e in edges) / (m * 2 ** (m - 1))


# -- union of equal disks -------------------------------------------------------


def _chord_primitive(t: float, r: float) -> float:
    # antiderivative of sqrt(r^2 - t^2)
    # one shared s keeps both terms consistent near t = +-r, where asin(t / r)
    # alone would lose half the significant digits
    t = min(max(t, -r), r)
    s = math.sqrt((r - t) * (r + t))
    return 0.5 * (t * s + r * r * math.atan2(t, s))


def _critical_ordinates(centers: Sequence[Point], r: float) -> list[float]:
    ys = []
    for _, cy in centers:
        ys.extend((cy - r, cy + r))
    n = len(centers)
    for i in range(n):
        for j in range(i + 1, n):
            (x0, y0), (x1, y1) = centers[i], centers[j]
            d = math.hypot(x1 - x0, y1 - y0)
            if d == 0.0 or d > 2.0 * r:
                continue
            h = math.sqrt(max(r * r - d * d / 4.0, 0.0))
            my = (y0 + y1) / 2.0
            # offset of the intersection points perpendicular to the center line
            oy = h * (x1 - x0) / d
            ys.extend((my + oy, my - oy))
    return sorted(set(ys))


def union_of_disks_area(centers: Iterable[Sequence[float]], r: float) -> float:
    """Area of the union of disks of common radius ``r``.

    The plane is cut into horizontal slabs at every disk's top and bottom and
    at every pairwise intersection ordinate. Inside a slab the order of the
    chord endpoints cannot change, so the merged cross-section at the slab
    midpoint tells which endpoint bounds each merged interval, and its length
    is integrated in closed form.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    pts = list(dict.fromkeys(_as_points(centers)))
    if not pts:
        return 0.0
    ys = _critical_ordinates(pts, r)
    area = 0.0
    for y0, y1 in zip(ys[:-1], ys[1:]):
        if y1 - y0 <= 0.0:
            continue
        ym = 0.5 * (y0 + y1)
        chords = []
        for k, (cx, cy) in enumerate(pts):
            dy = ym - cy
            if abs(dy) < r:
                h = math.sqrt(r * r - dy * dy)
                chords.append((cx - h, cx + h, k))
        if not chords:
            continue
        chords.sort()
        # merged intervals as (left disk, right disk)
        merged: list[list] = []
        for lo, hi, k in chords:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1][1] = hi
                    merged[-1][3] = k
            else:
                merged.append([lo, hi, k, k])
        for _, _, kl, kr in merged:
            cxl, cyl = pts[kl]
            cxr, cyr = pts[kr]
            # length = (cxr + h_r(y)) - (cxl - h_l(y))
            area += (cxr - cxl) * (y1 - y0)
            area += _chord_primitive(y1 - cyr, r) - _chord_primitive(y0 - cyr, r)
            area += _chord_primitive(y1 - cyl, r) - _chord_primitive(y0 - cyl, r)
    return area


def lens_union_area(d: float, r: float) -> float:
    """Closed-form area of two radius-``r`` disks with centers ``d`` apart."""
    if d >= 2.0 * r:
        return 2.0 * math.pi * r * r
    lens = 2.0 * r * r * math.acos(d / (2.0 * r)) - 0.5 * d * math.sqrt(4.0 * r * r - d * d)
    return 2.0 * math.pi * r * r - lens


# -- Steiner-type series ----------------------------------------------------------


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def hull_dilation_area(points: Iterable[Sequence[float]], r: float) -> float:
    """Exact area of ``conv(points) + B(r)`` from the planar Steiner formula."""
    m = convex_hull_metrics(points)
    return m.v2 + 2.0 * m.v1 * r + math.pi * r * r


def diameter(points: Iterable[Sequence[float]]) -> float:
    pts = _as_points(points)
    return max((math.dist(p, q) for p in pts for q in pts), default=0.0)


def dilation_area_series(points: Iterable[Sequence[float]], r: float, n_terms: int) -> float:
    """Area of the union of disks around ``points`` from the power-volume series.

    ``points`` are in absolute units. The hull dilation area is corrected by
    ``2 * sum_n (2n-3)!!/(2n)!! * V1^(2n+1)(points) * r**(1-2n)`` for
    ``n = 1..n_terms``, which is valid while the point set is small against
    ``r``; this requires ``diam(points) < r``.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    pts = _as_points(points)
    d = diameter(pts)
    if not d < r:
        raise ValueError(f"series needs diam/r < 1, got a/r ratio {d / r:.6g}")
    total = hull_dilation_area(pts, r)
    if len(set(pts)) < 2:
        return total
    correction = 0.0
    for n in range(1, n_terms + 1):
        coef = double_factorial(2 * n - 3) / double_factorial(2 * n)
        correction += coef * intrinsic_power_volume(pts, 2 * n + 1) * r ** (1 - 2 * n)
    return total - 2.0 * correction
