"""Pure-Python geometry kernels; signature-identical to the compiled module.

These are the hot inner loops of the spatial predicates and the
materializer. geoask.geometry picks the compiled twin when it imported.
"""

from __future__ import annotations

from math import asin, cos, radians, sin, sqrt

BACKEND = "python"

EARTH_RADIUS_M = 6371000.0
_COLLINEAR_EPS = 1e-9


def haversine_m(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    """Great-circle distance in metres on a spherical Earth."""
    phi1, phi2 = radians(lat1), radians(lat2)
    dphi = phi2 - phi1
    dlmb = radians(lon2 - lon1)
    h = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlmb / 2.0) ** 2
    if h > 1.0:
        h = 1.0
    return 2.0 * EARTH_RADIUS_M * asin(sqrt(h))


def min_haversine_m(xs1, ys1, xs2, ys2) -> float:
    """Minimum pairwise haversine distance between two point sets."""
    best = float("inf")
    for i in range(len(xs1)):
        x1, y1 = xs1[i], ys1[i]
        for j in range(len(xs2)):
            d = haversine_m(x1, y1, xs2[j], ys2[j])
            if d < best:
                best = d
    return best


def ring_crossings(x: float, y: float, xs, ys) -> int:
    """Ray-cast crossing count of a closed ring for even-odd point-in-polygon."""
    count = 0
    for i in range(len(xs) - 1):
        y1, y2 = ys[i], ys[i + 1]
        if (y1 > y) != (y2 > y):
            x_at = xs[i] + (y - y1) * (xs[i + 1] - xs[i]) / (y2 - y1)
            if x < x_at:
                count += 1
    return count


def point_on_polyline(x: float, y: float, xs, ys) -> bool:
    """True when (x, y) lies on any segment of the polyline."""
    for i in range(len(xs) - 1):
        ax, ay, bx, by = xs[i], ys[i], xs[i + 1], ys[i + 1]
        cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        if abs(cross) > _COLLINEAR_EPS:
            continue
        if min(ax, bx) - 1e-12 <= x <= max(ax, bx) + 1e-12 and min(ay, by) - 1e-12 <= y <= max(ay, by) + 1e-12:
            return True
    return False


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py) -> bool:
    return (
        min(ax, bx) - 1e-12 <= px <= max(ax, bx) + 1e-12
        and min(ay, by) - 1e-12 <= py <= max(ay, by) + 1e-12
    )


def segments_intersect(ax, ay, bx, by, cx, cy, dx, dy, proper: int) -> bool:
    """Segment AB vs CD. proper=1: strict interior crossing only; proper=0 also
    counts endpoint touching and collinear overlap."""
    d1 = _orient(cx, cy, dx, dy, ax, ay)
    d2 = _orient(cx, cy, dx, dy, bx, by)
    d3 = _orient(ax, ay, bx, by, cx, cy)
    d4 = _orient(ax, ay, bx, by, dx, dy)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if proper:
        return False
    if abs(d1) <= _COLLINEAR_EPS and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if abs(d2) <= _COLLINEAR_EPS and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    if abs(d3) <= _COLLINEAR_EPS and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if abs(d4) <= _COLLINEAR_EPS and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    return False


def polylines_cross(xs1, ys1, xs2, ys2, proper: int) -> bool:
    """Any segment of polyline 1 intersecting any segment of polyline 2."""
    for i in range(len(xs1) - 1):
        ax, ay, bx, by = xs1[i], ys1[i], xs1[i + 1], ys1[i + 1]
        lo_x, hi_x = (ax, bx) if ax <= bx else (bx, ax)
        lo_y, hi_y = (ay, by) if ay <= by else (by, ay)
        for j in range(len(xs2) - 1):
            cx, cy, dx, dy = xs2[j], ys2[j], xs2[j + 1], ys2[j + 1]
            if max(cx, dx) < lo_x - 1e-12 or min(cx, dx) > hi_x + 1e-12:
                continue
            if max(cy, dy) < lo_y - 1e-12 or min(cy, dy) > hi_y + 1e-12:
                continue
            if segments_intersect(ax, ay, bx, by, cx, cy, dx, dy, proper):
                return True
    return False
