# Copyright 2024 The artgallery Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Imports
import os
import logging
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Set, Tuple, Union


Scalar = Union[int, Fraction, str]


# Exceptions
class PolygonError(ValueError):
    """Raised when a polygon violates its invariants or a point lies outside of it."""


class PolygonParseError(PolygonError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    def __str__(self):
        return f"({self.x}, {self.y})"


def make_point(x: Scalar, y: Scalar) -> Point:
    """Create a point with exact rational coordinates (floats are converted exactly)."""
    return Point(Fraction(x), Fraction(y))


Ring = Tuple[Point, ...]
Edge = Tuple[Point, Point]


# Exact predicates
def cross(o: Point, a: Point, b: Point) -> Fraction:
    """Twice the signed area of triangle (o, a, b); positive when b is left of o->a."""
    return (a.x - o.x)*(b.y - o.y) - (a.y - o.y)*(b.x - o.x)


def _vec_cross(u: Point, v: Point) -> Fraction:
    return u.x*v.y - u.y*v.x


def _dot(u: Point, v: Point) -> Fraction:
    return u.x*v.x + u.y*v.y


def _sub(a: Point, b: Point) -> Point:
    return Point(a.x - b.x, a.y - b.y)


def on_segment(q: Point, a: Point, b: Point) -> bool:
    """True if q lies on the closed segment ab."""
    if cross(a, b, q) != 0:
        return False
    return min(a.x, b.x) <= q.x <= max(a.x, b.x) and min(a.y, b.y) <= q.y <= max(a.y, b.y)


def segment_intersections(a: Point, b: Point, c: Point, d: Point) -> List[Point]:
    """
    Exact intersection of the closed segments ab and cd.

    Returns:
        list: No point, the single intersection point, or the two endpoints of a collinear overlap
    """
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)

    if d1 == 0 and d2 == 0:
        pts = {q for q in (a, b) if on_segment(q, c, d)} | {q for q in (c, d) if on_segment(q, a, b)}
        return sorted(pts)

    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        t = d1/(d1 - d2)
        return [Point(a.x + t*(b.x - a.x), a.y + t*(b.y - a.y))]

    touches = set()
    if d1 == 0 and on_segment(a, c, d):
        touches.add(a)
    if d2 == 0 and on_segment(b, c, d):
        touches.add(b)
    if d3 == 0 and on_segment(c, a, b):
        touches.add(c)
    if d4 == 0 and on_segment(d, a, b):
        touches.add(d)
    return sorted(touches)


def properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True if the open segments ab and cd cross transversally at a single interior point."""
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    return ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4))


def ring_area2(ring: Sequence[Point]) -> Fraction:
    """Twice the signed area of a ring (positive for counterclockwise rings)."""
    total = Fraction(0)
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        total += a.x*b.y - a.y*b.x
    return total


def segment_parameter(q: Point, a: Point, b: Point) -> Fraction:
    """Position of q (assumed on line ab) along ab, 0 at a and 1 at b."""
    ab = _sub(b, a)
    return _dot(_sub(q, a), ab)/_dot(ab, ab)


def angle_compare(u: Point, v: Point) -> int:
    """Compare direction vectors by their counterclockwise angle from the positive x axis."""
    hu = 0 if (u.y > 0 or (u.y == 0 and u.x > 0)) else 1
    hv = 0 if (v.y > 0 or (v.y == 0 and v.x > 0)) else 1
    if hu != hv:
        return hu - hv
    c = _vec_cross(u, v)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


@dataclass(frozen=True)
class Polygon():
    """
    A polygonal region with an outer boundary and optional holes, in exact rational coordinates.

    The outer ring is counterclockwise and every hole ring is clockwise, so the interior
    always lies to the left of each directed edge returned by `edges`.
    """
    outer: Ring
    holes: Tuple[Ring, ...] = ()

    def rings(self) -> List[Ring]:
        return [self.outer] + list(self.holes)

    def vertices(self) -> List[Point]:
        return [v for ring in self.rings() for v in ring]

    def edges(self) -> List[Tuple[Point, Point]]:
        result = []
        for ring in self.rings():
            for i in range(len(ring)):
                result.append((ring[i], ring[(i + 1) % len(ring)]))
        return result

    def area(self) -> Fraction:
        return sum((ring_area2(r) for r in self.rings()), Fraction(0))/2

    def bbox(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [v.x for v in self.outer]
        ys = [v.y for v in self.outer]
        return min(xs), min(ys), max(xs), max(ys)

    def on_boundary(self, p: Point) -> bool:
        return any(on_segment(p, a, b) for a, b in self.edges())

    def contains(self, p: Point) -> bool:
        """Closed containment test (boundary points count as inside)."""
        if self.on_boundary(p):
            return True
        return self.contains_strict(p)

    def contains_strict(self, p: Point) -> bool:
        # even-odd crossing count over all rings; p is assumed off the boundary
        inside = False
        for a, b in self.edges():
            if (a.y > p.y) != (b.y > p.y):
                x_int = a.x + (p.y - a.y)*(b.x - a.x)/(b.y - a.y)
                if p.x < x_int:
                    inside = not inside
        return inside

    def is_convex(self) -> bool:
        if self.holes:
            return False
        n = len(self.outer)
        return all(cross(self.outer[i], self.outer[(i + 1) % n], self.outer[(i + 2) % n]) >= 0 for i in range(n))


@dataclass(frozen=True)
class VisibilityPolygon():
    """The region V(apex) of points seen from `apex`, stored as a hole-free polygon."""
    apex: Point
    region: Polygon

    def contains(self, q: Point) -> bool:
        return self.region.contains(q)


def make_polygon(outer: Sequence[Sequence[Scalar]], holes: Sequence[Sequence[Sequence[Scalar]]] = (),
                 validate: bool = True) -> Polygon:
    """
    Build a polygon from coordinate lists, orienting the outer ring counterclockwise
    and the holes clockwise.

    Args:
        outer (list): The outer ring as a list of (x, y) pairs
        holes (list): A list of hole rings, each a list of (x, y) pairs
        validate (bool): Whether to check the polygon invariants (see `validate_polygon`)

    Returns:
        Polygon: The oriented polygon
    """
    out_ring = tuple(p if isinstance(p, Point) else make_point(*p) for p in outer)
    if ring_area2(out_ring) < 0:
        out_ring = tuple(reversed(out_ring))
    hole_rings = []
    for h in holes:
        ring = tuple(p if isinstance(p, Point) else make_point(*p) for p in h)
        if ring_area2(ring) > 0:
            ring = tuple(reversed(ring))
        hole_rings.append(ring)
    polygon = Polygon(out_ring, tuple(hole_rings))
    if validate:
        validate_polygon(polygon)
    return polygon


def validate_polygon(P: Polygon):
    """
    Check the polygon invariants: simple rings with at least three vertices, no degenerate
    vertices, correct orientation, holes strictly inside the outer ring and pairwise disjoint.

    Raises:
        PolygonError: naming the first violated invariant
    """
    for k, ring in enumerate(P.rings()):
        name = "outer ring" if k == 0 else f"hole {k}"
        n = len(ring)
        if n < 3:
            raise PolygonError(f"{name} has fewer than 3 vertices")
        if len(set(ring)) != n:
            raise PolygonError(f"{name} repeats a vertex")
        for i in range(n):
            a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
            if cross(a, b, c) == 0:
                raise PolygonError(f"{name} has a degenerate (collinear) vertex at {b}")
        area2 = ring_area2(ring)
        if k == 0 and area2 <= 0:
            raise PolygonError("outer ring must be counterclockwise")
        if k > 0 and area2 >= 0:
            raise PolygonError(f"{name} must be clockwise")

    # pairwise edge tests; adjacent edges of the same ring may only share their common vertex
    edges = []
    for k, ring in enumerate(P.rings()):
        n = len(ring)
        for i in range(n):
            edges.append((k, i, ring[i], ring[(i + 1) % n], n))
    for idx, (k1, i1, a, b, n1) in enumerate(edges):
        for k2, i2, c, d, n2 in edges[idx + 1:]:
            if max(a.x, b.x) < min(c.x, d.x) or max(c.x, d.x) < min(a.x, b.x):
                continue
            if max(a.y, b.y) < min(c.y, d.y) or max(c.y, d.y) < min(a.y, b.y):
                continue
            hits = segment_intersections(a, b, c, d)
            if not hits:
                continue
            if k1 == k2 and (i2 == (i1 + 1) % n1 or i1 == (i2 + 1) % n1):
                shared = b if i2 == (i1 + 1) % n1 else a
                if hits == [shared]:
                    continue
            where = "outer ring" if k1 == 0 else f"hole {k1}"
            if k1 == k2:
                raise PolygonError(f"{where} is not simple near {hits[0]}")
            raise PolygonError(f"rings {k1} and {k2} touch or cross near {hits[0]}")

    outer_only = Polygon(P.outer)
    for k, hole in enumerate(P.holes, start=1):
        if not all(outer_only.contains_strict(v) for v in hole):
            raise PolygonError(f"hole {k} is not strictly inside the outer ring")
        for j, other in enumerate(P.holes, start=1):
            if j != k and Polygon(tuple(reversed(other))).contains_strict(hole[0]):
                raise PolygonError(f"hole {k} lies inside hole {j}")


# Visibility
def _check_inside(p: Point, P: Polygon):
    if not P.contains(p):
        raise PolygonError(f"point {p} lies outside the polygon")


def sees(a: Point, b: Point, P: Polygon) -> bool:
    """
    Exact visibility test: True iff the closed segment ab lies in P. Grazing the boundary
    counts as visible, crossing the interior of a hole or leaving the outer ring does not.

    Args:
        a (Point): First endpoint, must lie in P (boundary inclusive)
        b (Point): Second endpoint, must lie in P (boundary inclusive)
        P (Polygon): The polygon

    Returns:
        bool: Whether a and b see each other
    """
    _check_inside(a, P)
    _check_inside(b, P)
    if a == b:
        return True

    lo_x, hi_x = min(a.x, b.x), max(a.x, b.x)
    lo_y, hi_y = min(a.y, b.y), max(a.y, b.y)
    params = {Fraction(0), Fraction(1)}
    for c, d in P.edges():
        if max(c.x, d.x) < lo_x or min(c.x, d.x) > hi_x or max(c.y, d.y) < lo_y or min(c.y, d.y) > hi_y:
            continue
        if properly_cross(a, b, c, d):
            return False
        for q in segment_intersections(a, b, c, d):
            params.add(segment_parameter(q, a, b))

    # between consecutive boundary contacts the segment is entirely inside or outside
    ts = sorted(params)
    for t0, t1 in zip(ts, ts[1:]):
        t = (t0 + t1)/2
        if not P.contains(Point(a.x + t*(b.x - a.x), a.y + t*(b.y - a.y))):
            return False
    return True


def _ray_hit(p: Point, d: Point, a: Point, b: Point) -> Optional[Fraction]:
    # parameter t > 0 where p + t*d meets segment ab, parallel segments are ignored
    e = _sub(b, a)
    denom = _vec_cross(d, e)
    if denom == 0:
        return None
    ap = _sub(a, p)
    t = _vec_cross(ap, e)/denom
    u = _vec_cross(ap, d)/denom
    if t > 0 and 0 <= u <= 1:
        return t
    return None


def _line_point(p: Point, d: Point, a: Point, b: Point) -> Point:
    e = _sub(b, a)
    t = _vec_cross(_sub(a, p), e)/_vec_cross(d, e)
    return Point(p.x + t*d.x, p.y + t*d.y)


def _clean_ring(points: List[Point]) -> List[Point]:
    ring = list(points)
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        out: List[Point] = []
        for q in ring:
            if not out or out[-1] != q:
                out.append(q)
        while len(out) > 1 and out[0] == out[-1]:
            out.pop()
        ring = out
        n = len(ring)
        for i in range(n):
            if n >= 3 and cross(ring[i - 1], ring[i], ring[(i + 1) % n]) == 0:
                del ring[i]
                changed = True
                break
    return ring


@lru_cache(maxsize=8192)
def visibility_polygon(p: Point, P: Polygon) -> VisibilityPolygon:
    """
    Compute V(p) by an angular sweep around p. Vertex directions split the plane into open
    angular intervals; within each interval the nearest boundary edge is constant. The sweep
    keeps the set of edges spanning the current interval, updated at every vertex direction,
    and a ray through the interval picks the nearest of them. Directions that are
    visible only along a single ray (zero-width slits) do not contribute to the region.

    Args:
        p (Point): The apex, must lie in P
        P (Polygon): The polygon

    Returns:
        VisibilityPolygon: The visibility polygon of p
    """
    _check_inside(p, P)
    edges = P.edges()

    events = sorted(((_sub(v, p), v) for v in sorted(set(P.vertices())) if v != p),
                    key=cmp_to_key(lambda a, b: angle_compare(a[0], b[0])))  # type: ignore[index]
    unique: List[Point] = []
    at_direction: List[List[Point]] = []
    for d, v in events:
        if not unique or angle_compare(unique[-1], d) != 0:
            unique.append(d)
            at_direction.append([])
        at_direction[-1].append(v)
    if not unique:
        raise PolygonError(f"visibility region of {p} is degenerate")
    incident: Dict[Point, List[Edge]] = {}
    for a, b in edges:
        incident.setdefault(a, []).append((a, b))
        incident.setdefault(b, []).append((a, b))

    def ray_of(i: int) -> Point:
        d0, d1 = unique[i], unique[(i + 1) % len(unique)]
        if len(unique) > 1 and _vec_cross(d0, d1) > 0:
            return Point(d0.x + d1.x, d0.y + d1.y)
        return Point(-d0.y, d0.x)

    # edges crossing the first interval; later intervals are reached by updates at each direction
    active: Set[Edge] = {e for e in edges if _ray_hit(p, ray_of(0), *e) is not None}
    boundary: List[Point] = []
    m = len(unique)
    for i in range(m):
        d0, d1 = unique[i], unique[(i + 1) % m]
        if i > 0:
            for v in at_direction[i]:
                for a, b in incident[v]:
                    side = _vec_cross(d0, _sub(b if a == v else a, p))
                    if side > 0:
                        active.add((a, b))
                    elif side < 0:
                        active.discard((a, b))
        ray = ray_of(i)

        best_t, best_edge = None, None
        for a, b in active:
            t = _ray_hit(p, ray, a, b)
            if t is not None and (best_t is None or t < best_t):
                best_t, best_edge = t, (a, b)

        if best_t is None or best_edge is None:
            boundary.append(p)
            continue
        half = best_t/2
        if not P.contains(Point(p.x + half*ray.x, p.y + half*ray.y)):
            boundary.append(p)
            continue
        boundary.append(_line_point(p, d0, *best_edge))
        boundary.append(_line_point(p, d1, *best_edge))

    ring = _clean_ring(boundary)
    if len(ring) < 3:
        raise PolygonError(f"visibility region of {p} is degenerate")
    if ring_area2(ring) < 0:
        ring = list(reversed(ring))
    return VisibilityPolygon(apex=p, region=Polygon(tuple(ring)))


def kernel(P: Polygon) -> Optional[Polygon]:
    """
    Intersection of the closed inner half-planes of every edge of P, holes included.

    Returns:
        Polygon or None: The kernel, or None when it is empty or has no interior
    """
    x0, y0, x1, y1 = P.bbox()
    region = [Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)]
    for a, b in P.edges():
        clipped: List[Point] = []
        n = len(region)
        for i in range(n):
            cur, nxt = region[i], region[(i + 1) % n]
            c_cur, c_nxt = cross(a, b, cur), cross(a, b, nxt)
            if c_cur >= 0:
                clipped.append(cur)
            if (c_cur > 0 > c_nxt) or (c_cur < 0 < c_nxt):
                t = c_cur/(c_cur - c_nxt)
                clipped.append(Point(cur.x + t*(nxt.x - cur.x), cur.y + t*(nxt.y - cur.y)))
        region = clipped
        if not region:
            return None

    ring = _clean_ring(region)
    if len(ring) < 3 or ring_area2(ring) <= 0:
        return None
    return Polygon(tuple(ring))


def is_star_shaped(P: Polygon) -> bool:
    return kernel(P) is not None


# Polygon text format
def parse_polygon(text: str) -> Polygon:
    """
    Parse the polygon text format: an `outer k` header followed by k vertex lines, then any
    number of `hole k` blocks. Coordinates are rationals such as `3/2`, `-4` or `0.25`.
    Blank lines and `#` comments are ignored.

    Raises:
        PolygonParseError: with the offending line number
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))

    rings: List[List[Point]] = []
    kinds: List[str] = []
    i = 0
    while i < len(lines):
        lineno, line = lines[i]
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("outer", "hole"):
            raise PolygonParseError(lineno, f"expected 'outer k' or 'hole k', got '{line}'")
        if parts[0] == "outer" and rings:
            raise PolygonParseError(lineno, "only one outer ring is allowed")
        if parts[0] == "hole" and not rings:
            raise PolygonParseError(lineno, "hole given before the outer ring")
        try:
            k = int(parts[1])
        except ValueError:
            raise PolygonParseError(lineno, f"invalid vertex count '{parts[1]}'")
        if k < 3:
            raise PolygonParseError(lineno, "a ring needs at least 3 vertices")
        ring = []
        for j in range(1, k + 1):
            if i + j >= len(lines):
                raise PolygonParseError(lineno, f"expected {k} vertices, file ended after {j - 1}")
            vno, vline = lines[i + j]
            coords = vline.split()
            if len(coords) != 2:
                raise PolygonParseError(vno, f"expected 'x y', got '{vline}'")
            try:
                ring.append(make_point(Fraction(coords[0]), Fraction(coords[1])))
            except (ValueError, ZeroDivisionError):
                raise PolygonParseError(vno, f"invalid rational coordinate in '{vline}'")
        rings.append(ring)
        kinds.append(parts[0])
        i += k + 1

    if not rings:
        raise PolygonParseError(1, "no outer ring found")

    if ring_area2(rings[0]) < 0:
        logging.warning("Outer ring is clockwise, reorienting it to counterclockwise")
    for h in rings[1:]:
        if ring_area2(h) > 0:
            logging.warning("Hole ring is counterclockwise, reorienting it to clockwise")
    return make_polygon(rings[0], rings[1:])


def read_polygon(path: str) -> Polygon:
    """Read a polygon from a file in the polygon text format."""
    with open(path, "r") as f:
        return parse_polygon(f.read())


def format_polygon(P: Polygon) -> str:
    lines = [f"outer {len(P.outer)}"]
    lines.extend(f"{v.x} {v.y}" for v in P.outer)
    for h in P.holes:
        lines.append(f"hole {len(h)}")
        lines.extend(f"{v.x} {v.y}" for v in h)
    return "\n".join(lines) + "\n"


def write_polygon(P: Polygon, path: str):
    """Write a polygon to `path` in the polygon text format, with exact rational coordinates."""
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, "w") as f:
        f.write(format_polygon(P))
