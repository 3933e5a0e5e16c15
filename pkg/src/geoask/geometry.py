"""WKT geometry model, simple-features predicates and geodesic distance.

Semantics (fixed for this engine, and what all tests assume):
- within is reflexive: every geometry is within itself.
- containment tests use inside-or-on-boundary vertex checks plus "no proper
  edge crossing"; self-touching rings are out of scope.
- distance_metres(a, b) is 0 exactly when the geometries intersect, else the
  minimum haversine distance between boundary point sets densified at
  segments of at most 0.01 degrees.

The coordinate-level inner loops live in a compiled extension with a pure
Python fallback; set GEOASK_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os
import re
from array import array
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, hypot

from .terms import GeoAskError

if os.environ.get("GEOASK_PURE_PYTHON"):
    from . import _pykernels as kernels
else:
    try:
        from . import _geokernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as kernels

BACKEND = kernels.BACKEND
EARTH_RADIUS_M = 6371000.0
DENSIFY_STEP_DEG = 0.01

POINT = "Point"
LINESTRING = "LineString"
POLYGON = "Polygon"
MULTIPOLYGON = "MultiPolygon"


class WktError(GeoAskError):
    pass


Path = list[tuple[float, float]]


def _pack(points: Path) -> tuple[array, array]:
    return array("d", (p[0] for p in points)), array("d", (p[1] for p in points))


@dataclass
class Geometry:
    kind: str
    # One entry per polygon part; non-areal kinds use a single part whose
    # rings list holds the point/path vertices.
    parts: list[list[Path]]
    _packed: list[list[tuple[array, array]]] = field(default=None, repr=False, compare=False)
    _densified: tuple[array, array] = field(default=None, repr=False, compare=False)

    @property
    def is_areal(self) -> bool:
        return self.kind in (POLYGON, MULTIPOLYGON)

    def packed(self) -> list[list[tuple[array, array]]]:
        if self._packed is None:
            self._packed = [[_pack(ring) for ring in part] for part in self.parts]
        return self._packed

    def paths(self) -> list[tuple[array, array]]:
        """All boundary polylines (rings for areal kinds) as packed arrays."""
        return [packed for part in self.packed() for packed in part]

    def vertices(self):
        for part in self.parts:
            for ring in part:
                yield from ring

    def densified(self) -> tuple[array, array]:
        """Boundary point set with every segment subdivided to <= 0.01 degrees."""
        if self._densified is None:
            xs, ys = array("d"), array("d")
            for part in self.parts:
                for ring in part:
                    if len(ring) == 1:
                        xs.append(ring[0][0])
                        ys.append(ring[0][1])
                        continue
                    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
                        steps = max(1, ceil(hypot(x2 - x1, y2 - y1) / DENSIFY_STEP_DEG))
                        for s in range(steps):
                            t = s / steps
                            xs.append(x1 + (x2 - x1) * t)
                            ys.append(y1 + (y2 - y1) * t)
                    xs.append(ring[-1][0])
                    ys.append(ring[-1][1])
            self._densified = (xs, ys)
        return self._densified


def _validate_ring(ring: Path, what: str):
    if len(ring) < 4:
        raise WktError(f"{what}: ring needs at least 4 vertices, got {len(ring)}")
    if ring[0] != ring[-1]:
        raise WktError(f"{what}: ring is not closed")


def _validate_coords(points: Path):
    for x, y in points:
        if not (-180.0 <= x <= 180.0):
            raise WktError(f"longitude {x} out of [-180, 180]")
        if not (-90.0 <= y <= 90.0):
            raise WktError(f"latitude {y} out of [-90, 90]")


def point(x: float, y: float) -> Geometry:
    g = Geometry(POINT, [[[(float(x), float(y))]]])
    _validate_coords(g.parts[0][0])
    return g


def linestring(points: Path) -> Geometry:
    if len(points) < 2:
        raise WktError("LINESTRING needs at least 2 points")
    _validate_coords(points)
    return Geometry(LINESTRING, [[list(points)]])


def polygon(rings: list[Path]) -> Geometry:
    if not rings:
        raise WktError("POLYGON needs at least one ring")
    for ring in rings:
        _validate_ring(ring, "POLYGON")
        _validate_coords(ring)
    return Geometry(POLYGON, [[list(r) for r in rings]])


def multipolygon(parts: list[list[Path]]) -> Geometry:
    if not parts:
        raise WktError("MULTIPOLYGON needs at least one polygon")
    for rings in parts:
        if not rings:
            raise WktError("MULTIPOLYGON: empty polygon")
        for ring in rings:
            _validate_ring(ring, "MULTIPOLYGON")
            _validate_coords(ring)
    return Geometry(MULTIPOLYGON, [[list(r) for r in rings] for rings in parts])


_WKT_HEAD = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*(.*)$", re.S)
_NUM = r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"
_PAIR_RE = re.compile(rf"^\s*({_NUM})\s+({_NUM})\s*$")


def _parse_pairs(body: str, what: str) -> Path:
    points = []
    for chunk in body.split(","):
        m = _PAIR_RE.match(chunk)
        if not m:
            raise WktError(f"{what}: expected 'x y' coordinate pair, got {chunk.strip()!r}")
        points.append((float(m.group(1)), float(m.group(2))))
    return points


def _split_groups(body: str, what: str) -> list[str]:
    """Split 'a),(b),(c' style bodies at top-level commas."""
    groups, depth, start = [], 0, 0
    for i, c in enumerate(body):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth < 0:
                raise WktError(f"{what}: unbalanced parentheses")
        elif c == "," and depth == 0:
            groups.append(body[start:i])
            start = i + 1
    if depth != 0:
        raise WktError(f"{what}: unbalanced parentheses")
    groups.append(body[start:])
    return groups


def _strip_parens(text: str, what: str) -> str:
    text = text.strip()
    if not text.startswith("(") or not text.endswith(")"):
        raise WktError(f"{what}: expected parenthesized group, got {text[:40]!r}")
    return text[1:-1]


@lru_cache(maxsize=8192)
def parse_wkt(text: str) -> Geometry:
    """Parse POINT/LINESTRING/POLYGON/MULTIPOLYGON WKT text."""
    m = _WKT_HEAD.match(text or "")
    if not m:
        raise WktError(f"not WKT: {text!r}")
    kind = m.group(1).upper()
    body = m.group(2).strip()
    if kind == "POINT":
        pts = _parse_pairs(_strip_parens(body, "POINT"), "POINT")
        if len(pts) != 1:
            raise WktError(f"POINT: expected one coordinate pair, got {len(pts)}")
        return point(*pts[0])
    if kind == "LINESTRING":
        return linestring(_parse_pairs(_strip_parens(body, "LINESTRING"), "LINESTRING"))
    if kind == "POLYGON":
        rings_body = _strip_parens(body, "POLYGON")
        rings = [_parse_pairs(_strip_parens(g, "POLYGON ring"), "POLYGON") for g in _split_groups(rings_body, "POLYGON")]
        return polygon(rings)
    if kind == "MULTIPOLYGON":
        outer = _strip_parens(body, "MULTIPOLYGON")
        parts = []
        for group in _split_groups(outer, "MULTIPOLYGON"):
            rings_body = _strip_parens(group, "MULTIPOLYGON polygon")
            parts.append(
                [_parse_pairs(_strip_parens(g, "ring"), "MULTIPOLYGON") for g in _split_groups(rings_body, "MULTIPOLYGON")]
            )
        return multipolygon(parts)
    raise WktError(f"unsupported geometry kind: {kind}")


def to_wkt(g: Geometry) -> str:
    def fmt(p):
        return f"{p[0]:g} {p[1]:g}"

    if g.kind == POINT:
        return f"POINT({fmt(g.parts[0][0][0])})"
    if g.kind == LINESTRING:
        return "LINESTRING(" + ",".join(fmt(p) for p in g.parts[0][0]) + ")"
    if g.kind == POLYGON:
        return "POLYGON(" + ",".join("(" + ",".join(fmt(p) for p in ring) + ")" for ring in g.parts[0]) + ")"
    return (
        "MULTIPOLYGON("
        + ",".join(
            "(" + ",".join("(" + ",".join(fmt(p) for p in ring) + ")" for ring in part) + ")" for part in g.parts
        )
        + ")"
    )


# -- predicates -------------------------------------------------------------


def _inside_part(x: float, y: float, part_packed) -> bool:
    crossings = 0
    for xs, ys in part_packed:
        crossings += kernels.ring_crossings(x, y, xs, ys)
    return crossings % 2 == 1


def _on_part_boundary(x: float, y: float, part_packed) -> bool:
    return any(kernels.point_on_polyline(x, y, xs, ys) for xs, ys in part_packed)


def _point_in_areal(x: float, y: float, g: Geometry) -> bool:
    return any(_inside_part(x, y, part) or _on_part_boundary(x, y, part) for part in g.packed())


def _point_on_geometry(x: float, y: float, g: Geometry) -> bool:
    if g.kind == POINT:
        px, py = g.parts[0][0][0]
        return px == x and py == y
    return any(kernels.point_on_polyline(x, y, xs, ys) for xs, ys in g.paths())


def _within_single_part(a: Geometry, part_packed) -> bool:
    for x, y in a.vertices():
        if not (_inside_part(x, y, part_packed) or _on_part_boundary(x, y, part_packed)):
            return False
    for axs, ays in a.paths():
        if len(axs) < 2:
            continue
        for bxs, bys in part_packed:
            if kernels.polylines_cross(axs, ays, bxs, bys, 1):
                return False
    return True


def sf_within(a: Geometry, b: Geometry) -> bool:
    """Simple-features within; reflexive by construction."""
    if b.is_areal:
        if a.kind == MULTIPOLYGON:
            return all(sf_within(Geometry(POLYGON, [part]), b) for part in a.parts)
        return any(_within_single_part(a, part) for part in b.packed())
    if b.kind == POINT:
        return a.kind == POINT and a.parts == b.parts
    # b is a LineString: only point-on-line and vertex-wise line coverage.
    return all(_point_on_geometry(x, y, b) for x, y in a.vertices())


def sf_contains(a: Geometry, b: Geometry) -> bool:
    return sf_within(b, a)


def sf_intersects(a: Geometry, b: Geometry) -> bool:
    """Symmetric intersection test, boundary contact included."""
    if a.kind == POINT:
        x, y = a.parts[0][0][0]
        return _point_in_areal(x, y, b) if b.is_areal else _point_on_geometry(x, y, b)
    if b.kind == POINT:
        return sf_intersects(b, a)
    if b.is_areal:
        for x, y in a.vertices():
            if _point_in_areal(x, y, b):
                return True
    if a.is_areal:
        for x, y in b.vertices():
            if _point_in_areal(x, y, a):
                return True
    for axs, ays in a.paths():
        for bxs, bys in b.paths():
            if kernels.polylines_cross(axs, ays, bxs, bys, 0):
                return True
    return False


def distance_metres(a: Geometry, b: Geometry) -> float:
    """Minimum geodesic distance; exactly 0 iff the geometries intersect."""
    if sf_intersects(a, b):
        return 0.0
    xs1, ys1 = a.densified()
    xs2, ys2 = b.densified()
    return kernels.min_haversine_m(xs1, ys1, xs2, ys2)


def haversine_metres(lon1: float, lat1: float, lon2: float, lat2: float) -> float:
    return kernels.haversine_m(lon1, lat1, lon2, lat2)
