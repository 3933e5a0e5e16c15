# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels; signature-identical to geoask._pykernels."""

from libc.math cimport asin, cos, fabs, sin, sqrt, M_PI

BACKEND = "cython"

cdef double EARTH_RADIUS_M = 6371000.0
cdef double COLLINEAR_EPS = 1e-9
cdef double BOX_EPS = 1e-12


cdef inline double _hav(double lon1, double lat1, double lon2, double lat2) nogil:
    cdef double phi1 = lat1 * M_PI / 180.0
    cdef double phi2 = lat2 * M_PI / 180.0
    cdef double dphi = phi2 - phi1
    cdef double dlmb = (lon2 - lon1) * M_PI / 180.0
    cdef double h = sin(dphi / 2.0) ** 2 + cos(phi1) * cos(phi2) * sin(dlmb / 2.0) ** 2
    if h > 1.0:
        h = 1.0
    return 2.0 * EARTH_RADIUS_M * asin(sqrt(h))


def haversine_m(double lon1, double lat1, double lon2, double lat2):
    return _hav(lon1, lat1, lon2, lat2)


def min_haversine_m(double[:] xs1, double[:] ys1, double[:] xs2, double[:] ys2):
    cdef double best = 1e300
    cdef double d
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(xs1.shape[0]):
            for j in range(xs2.shape[0]):
                d = _hav(xs1[i], ys1[i], xs2[j], ys2[j])
                if d < best:
                    best = d
    return best


def ring_crossings(double x, double y, double[:] xs, double[:] ys):
    cdef int count = 0
    cdef Py_ssize_t i
    cdef double y1, y2, x_at
    for i in range(xs.shape[0] - 1):
        y1 = ys[i]
        y2 = ys[i + 1]
        if (y1 > y) != (y2 > y):
            x_at = xs[i] + (y - y1) * (xs[i + 1] - xs[i]) / (y2 - y1)
            if x < x_at:
                count += 1
    return count


def point_on_polyline(double x, double y, double[:] xs, double[:] ys):
    cdef Py_ssize_t i
    cdef double ax, ay, bx, by, cross
    for i in range(xs.shape[0] - 1):
        ax = xs[i]
        ay = ys[i]
        bx = xs[i + 1]
        by = ys[i + 1]
        cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        if fabs(cross) > COLLINEAR_EPS:
            continue
        if (min(ax, bx) - BOX_EPS <= x <= max(ax, bx) + BOX_EPS
                and min(ay, by) - BOX_EPS <= y <= max(ay, by) + BOX_EPS):
            return True
    return False


cdef inline double _orient(double ax, double ay, double bx, double by, double cx, double cy) nogil:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


cdef inline bint _on_segment(double ax, double ay, double bx, double by, double px, double py) nogil:
    return (min(ax, bx) - BOX_EPS <= px <= max(ax, bx) + BOX_EPS
            and min(ay, by) - BOX_EPS <= py <= max(ay, by) + BOX_EPS)


cdef bint _seg_intersect(double ax, double ay, double bx, double by,
                         double cx, double cy, double dx, double dy, int proper) nogil:
    cdef double d1 = _orient(cx, cy, dx, dy, ax, ay)
    cdef double d2 = _orient(cx, cy, dx, dy, bx, by)
    cdef double d3 = _orient(ax, ay, bx, by, cx, cy)
    cdef double d4 = _orient(ax, ay, bx, by, dx, dy)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if proper:
        return False
    if fabs(d1) <= COLLINEAR_EPS and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if fabs(d2) <= COLLINEAR_EPS and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    if fabs(d3) <= COLLINEAR_EPS and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if fabs(d4) <= COLLINEAR_EPS and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    return False


def segments_intersect(double ax, double ay, double bx, double by,
                       double cx, double cy, double dx, double dy, int proper):
    return _seg_intersect(ax, ay, bx, by, cx, cy, dx, dy, proper)


def polylines_cross(double[:] xs1, double[:] ys1, double[:] xs2, double[:] ys2, int proper):
    cdef Py_ssize_t i, j
    cdef double ax, ay, bx, by, cx, cy, dx, dy, lo_x, hi_x, lo_y, hi_y
    cdef bint hit = False
    with nogil:
        for i in range(xs1.shape[0] - 1):
            ax = xs1[i]
            ay = ys1[i]
            bx = xs1[i + 1]
            by = ys1[i + 1]
            lo_x = min(ax, bx)
            hi_x = max(ax, bx)
            lo_y = min(ay, by)
            hi_y = max(ay, by)
            for j in range(xs2.shape[0] - 1):
                cx = xs2[j]
                cy = ys2[j]
                dx = xs2[j + 1]
                dy = ys2[j + 1]
                if max(cx, dx) < lo_x - BOX_EPS or min(cx, dx) > hi_x + BOX_EPS:
                    continue
                if max(cy, dy) < lo_y - BOX_EPS or min(cy, dy) > hi_y + BOX_EPS:
                    continue
                if _seg_intersect(ax, ay, bx, by, cx, cy, dx, dy, proper):
                    hit = True
                    break
            if hit:
                break
    return hit
