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
import logging
from fractions import Fraction
from collections import defaultdict, deque
from functools import cmp_to_key
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from artgallery.geometry import (Point, Polygon, angle_compare, ring_area2, segment_intersections,
                                 segment_parameter, on_segment)


Weight = Union[Fraction, float]
WeightFunction = Callable[[FrozenSet[int]], Weight]


@dataclass(frozen=True)
class Cell():
    """
    A face, edge or vertex of an arrangement, with a representative point and the set of
    input regions containing it.
    """
    kind: str
    point: Point
    labels: FrozenSet[int]
    weight: Weight


class Arrangement():
    """
    The planar subdivision induced by the boundaries of a list of regions and of the polygon
    containing them, stored as a doubly-connected edge list. Every face, edge and vertex is
    labelled with the set of regions containing it, and weights are derived from the labels.
    """
    def __init__(self, regions: Sequence[Polygon], weights: Sequence[Weight], boundary: Polygon):
        """
        Build the arrangement.

        Args:
            regions (List[Polygon]): The input regions, each contained in `boundary`
            weights (List): One weight per region
            boundary (Polygon): The polygon P clipping the arrangement
        """
        if len(regions) != len(weights):
            raise ValueError("regions and weights must have the same length")
        self.regions = list(regions)
        self.weights = list(weights)
        self.boundary = boundary
        self._p_label = len(self.regions)
        self._face_points: Dict[int, Point] = {}

        self._build_edges()
        self._build_half_edges()
        self._build_faces()
        self._label_faces()

    # Construction
    def _build_edges(self):
        segments: List[Tuple[Point, Point, int]] = []
        for r, region in enumerate(self.regions):
            for a, b in region.edges():
                segments.append((a, b, r))
        for a, b in self.boundary.edges():
            segments.append((a, b, self._p_label))

        split_points: List[Set[Point]] = [{a, b} for a, b, _ in segments]

        # sort-and-sweep over x extents, exact tests only for overlapping boxes
        order = sorted(range(len(segments)), key=lambda i: min(segments[i][0].x, segments[i][1].x))
        active: List[int] = []
        for i in order:
            a, b, _ = segments[i]
            lo_x = min(a.x, b.x)
            active = [j for j in active if max(segments[j][0].x, segments[j][1].x) >= lo_x]
            for j in active:
                c, d, _ = segments[j]
                if max(a.y, b.y) < min(c.y, d.y) or max(c.y, d.y) < min(a.y, b.y):
                    continue
                for q in segment_intersections(a, b, c, d):
                    split_points[i].add(q)
                    split_points[j].add(q)
            active.append(i)

        # edges keyed by ordered endpoint pair, regions on the left of key[0] -> key[1] or on the right
        self._edge_left: Dict[Tuple[Point, Point], Set[int]] = defaultdict(set)
        self._edge_right: Dict[Tuple[Point, Point], Set[int]] = defaultdict(set)
        for (a, b, r), pts in zip(segments, split_points):
            ordered = sorted(pts, key=lambda q: segment_parameter(q, a, b))
            for u, v in zip(ordered, ordered[1:]):
                if u < v:
                    self._edge_left[(u, v)].add(r)
                    self._edge_right[(u, v)]
                else:
                    self._edge_right[(v, u)].add(r)
                    self._edge_left[(v, u)]

    def _build_half_edges(self):
        keys = sorted(self._edge_left.keys())
        self.vertices: List[Point] = sorted({p for k in keys for p in k})
        vid = {p: i for i, p in enumerate(self.vertices)}

        # half-edge 2e runs key[0] -> key[1], half-edge 2e+1 is its twin
        self.origin: List[int] = []
        self.left: List[FrozenSet[int]] = []
        self.edge_keys = keys
        for key in keys:
            self.origin.append(vid[key[0]])
            self.origin.append(vid[key[1]])
            self.left.append(frozenset(self._edge_left[key]))
            self.left.append(frozenset(self._edge_right[key]))

        outgoing: Dict[int, List[int]] = defaultdict(list)
        for h in range(len(self.origin)):
            outgoing[self.origin[h]].append(h)

        def direction(h: int) -> Point:
            a, b = self.vertices[self.origin[h]], self.vertices[self.origin[h ^ 1]]
            return Point(b.x - a.x, b.y - a.y)

        self.outgoing: Dict[int, List[int]] = {}
        position: Dict[int, int] = {}
        for v, hs in outgoing.items():
            hs.sort(key=cmp_to_key(lambda g, h: angle_compare(direction(g), direction(h))))
            self.outgoing[v] = hs
            for i, h in enumerate(hs):
                position[h] = i

        # next(h) is the outgoing edge at the head of h immediately clockwise from twin(h)
        self.next: List[int] = [0]*len(self.origin)
        for h in range(len(self.origin)):
            twin = h ^ 1
            hs = self.outgoing[self.origin[twin]]
            self.next[h] = hs[position[twin] - 1]

    def _build_faces(self):
        n_half = len(self.origin)
        self.cycle_of: List[int] = [-1]*n_half
        self.cycles: List[List[int]] = []
        for h in range(n_half):
            if self.cycle_of[h] != -1:
                continue
            cycle = []
            g = h
            while self.cycle_of[g] == -1:
                self.cycle_of[g] = len(self.cycles)
                cycle.append(g)
                g = self.next[g]
            self.cycles.append(cycle)

        self.cycle_area2 = [ring_area2([self.vertices[self.origin[h]] for h in c]) for c in self.cycles]

        # face 0 is the unbounded face, every positive cycle bounds one more face
        self.face_outer: List[Optional[int]] = [None]
        self.face_inner: List[List[int]] = [[]]
        cycle_face: Dict[int, int] = {}
        for c, area in enumerate(self.cycle_area2):
            if area > 0:
                cycle_face[c] = len(self.face_outer)
                self.face_outer.append(c)
                self.face_inner.append([])

        def resolve(c: int) -> int:
            if c in cycle_face:
                return cycle_face[c]
            lowest_left = min((self.origin[h] for h in self.cycles[c]), key=lambda v: self.vertices[v])
            hit = self._shoot_left(self.vertices[lowest_left])
            face = 0 if hit is None else resolve(self.cycle_of[hit])
            cycle_face[c] = face
            self.face_inner[face].append(c)
            return face

        for c in range(len(self.cycles)):
            resolve(c)
        self.face_of_half: List[int] = [cycle_face[self.cycle_of[h]] for h in range(n_half)]
        logging.debug(f"Arrangement with {len(self.vertices)} vertices, {len(self.edge_keys)} edges "
                      f"and {len(self.face_outer) - 1} bounded faces")

    def _shoot_left(self, q: Point) -> Optional[int]:
        """Half-edge whose left face contains the points just left of q, or None for the unbounded face."""
        best_x: Optional[Fraction] = None
        best_edge: Optional[int] = None
        best_vertex: Optional[Point] = None
        for e, (a, b) in enumerate(self.edge_keys):
            if a.y == b.y:
                if a.y == q.y and max(a.x, b.x) < q.x:
                    x = max(a.x, b.x)
                    if best_x is None or x > best_x:
                        best_x, best_edge, best_vertex = x, e, a if a.x > b.x else b
                continue
            if min(a.y, b.y) <= q.y <= max(a.y, b.y):
                x = a.x + (q.y - a.y)*(b.x - a.x)/(b.y - a.y)
                if x < q.x and (best_x is None or x > best_x):
                    best_x, best_edge = x, e
                    best_vertex = a if q.y == a.y else (b if q.y == b.y else None)
        if best_edge is None or best_x is None:
            return None
        hit = Point(best_x, q.y)
        if best_vertex is not None or hit in self._vertex_index():
            # wedge at the hit vertex containing direction +x lies left of the last outgoing edge
            v = self._vertex_index()[hit]
            return self.outgoing[v][-1]
        a, b = self.edge_keys[best_edge]
        # the left side of the downward half-edge faces +x
        return 2*best_edge if b.y < a.y else 2*best_edge + 1

    def _vertex_index(self) -> Dict[Point, int]:
        if not hasattr(self, "_vid"):
            self._vid = {p: i for i, p in enumerate(self.vertices)}
        return self._vid

    def _label_faces(self):
        n_faces = len(self.face_outer)
        self.face_labels: List[Optional[FrozenSet[int]]] = [None]*n_faces
        self.face_labels[0] = frozenset()
        by_face: Dict[int, List[int]] = defaultdict(list)
        for h, f in enumerate(self.face_of_half):
            by_face[f].append(h)

        queue = deque([0])
        while queue:
            f = queue.popleft()
            labels = self.face_labels[f]
            assert labels is not None
            for h in by_face[f]:
                g = self.face_of_half[h ^ 1]
                if self.face_labels[g] is None:
                    self.face_labels[g] = (labels - self.left[h]) | self.left[h ^ 1]
                    queue.append(g)

    # Queries
    def _weight(self, labels: FrozenSet[int], weight_fn: Optional[WeightFunction]) -> Weight:
        if weight_fn is not None:
            return weight_fn(labels)
        return sum((self.weights[r] for r in labels), Fraction(0))

    def _face_point(self, f: int) -> Point:
        if f in self._face_points:
            return self._face_points[f]
        cycles = [self.face_outer[f]] + self.face_inner[f]
        half_edges = [h for c in cycles if c is not None for h in self.cycles[c]]
        outer = self.face_outer[f]
        assert outer is not None
        y_min = min(self.vertices[self.origin[h]].y for h in self.cycles[outer])
        y_next = min(self.vertices[self.origin[h]].y for h in half_edges
                     if self.vertices[self.origin[h]].y > y_min)
        y0 = (y_min + y_next)/2

        members = set(half_edges)
        crossings: List[Tuple[Fraction, bool]] = []
        for e, (a, b) in enumerate(self.edge_keys):
            if (a.y < y0 < b.y) or (b.y < y0 < a.y):
                x = a.x + (y0 - a.y)*(b.x - a.x)/(b.y - a.y)
                on_face_boundary = (2*e in members) != (2*e + 1 in members)
                crossings.append((x, on_face_boundary))
        crossings.sort()

        inside = False
        for (x0, boundary0), (x1, _) in zip(crossings, crossings[1:]):
            if boundary0:
                inside = not inside
            if inside and x1 > x0:
                p = Point((x0 + x1)/2, y0)
                if self.locate_face(p) == f:
                    self._face_points[f] = p
                    return p
        raise RuntimeError(f"could not find an interior point for face {f}")

    def locate_face(self, q: Point) -> int:
        """Index of the face containing q, which must not lie on an edge."""
        hit = self._shoot_left(q)
        return 0 if hit is None else self.face_of_half[hit]

    def faces(self, weight_fn: Optional[WeightFunction] = None) -> List[Cell]:
        """Bounded faces inside the polygon, each with an interior representative point."""
        result = []
        for f in range(1, len(self.face_outer)):
            labels = self.face_labels[f]
            assert labels is not None
            if self._p_label in labels:
                inner = labels - {self._p_label}
                result.append(Cell("face", self._face_point(f), inner, self._weight(inner, weight_fn)))
        return result

    def edges(self, weight_fn: Optional[WeightFunction] = None) -> List[Cell]:
        """Open edges inside the polygon (boundary included), represented by their midpoints."""
        result = []
        for e, (a, b) in enumerate(self.edge_keys):
            labels = self._edge_labels(e)
            if self._p_label in labels:
                inner = labels - {self._p_label}
                mid = Point((a.x + b.x)/2, (a.y + b.y)/2)
                result.append(Cell("edge", mid, inner, self._weight(inner, weight_fn)))
        return result

    def _edge_labels(self, e: int) -> FrozenSet[int]:
        left = self.face_labels[self.face_of_half[2*e]]
        right = self.face_labels[self.face_of_half[2*e + 1]]
        assert left is not None and right is not None
        return left | right

    def vertex_cells(self, weight_fn: Optional[WeightFunction] = None) -> List[Cell]:
        """Arrangement vertices inside the polygon with the closed-region labels."""
        labels_at: Dict[int, Set[int]] = defaultdict(set)
        for e in range(len(self.edge_keys)):
            labels = self._edge_labels(e)
            labels_at[self.origin[2*e]] |= labels
            labels_at[self.origin[2*e + 1]] |= labels
        result = []
        for v, p in enumerate(self.vertices):
            labels = frozenset(labels_at[v])
            if self._p_label in labels:
                inner = labels - {self._p_label}
                result.append(Cell("vertex", p, inner, self._weight(inner, weight_fn)))
        return result

    def cells(self, weight_fn: Optional[WeightFunction] = None) -> List[Cell]:
        """All faces, edges and vertices inside the polygon, in that order."""
        return self.faces(weight_fn) + self.edges(weight_fn) + self.vertex_cells(weight_fn)

    def min_cells(self, weight_fn: Optional[WeightFunction] = None) -> List[Cell]:
        cells = self.cells(weight_fn)
        lowest = min(c.weight for c in cells)
        return [c for c in cells if c.weight == lowest]

    def max_cells(self, weight_fn: Optional[WeightFunction] = None) -> List[Cell]:
        cells = self.cells(weight_fn)
        highest = max(c.weight for c in cells)
        return [c for c in cells if c.weight == highest]

    def locate(self, q: Point, weight_fn: Optional[WeightFunction] = None) -> Cell:
        """The cell containing q (vertex, edge or face)."""
        vid = self._vertex_index()
        if q in vid:
            for cell in self.vertex_cells(weight_fn):
                if cell.point == q:
                    return cell
        for e, (a, b) in enumerate(self.edge_keys):
            if on_segment(q, a, b):
                labels = self._edge_labels(e) - {self._p_label}
                return Cell("edge", q, labels, self._weight(labels, weight_fn))
        labels_f = self.face_labels[self.locate_face(q)]
        assert labels_f is not None
        labels = labels_f - {self._p_label}
        return Cell("face", q, labels, self._weight(labels, weight_fn))


def overlay(regions: Sequence[Tuple[Polygon, Weight]], P: Polygon) -> Arrangement:
    """
    Overlay weighted regions inside P.

    Args:
        regions (list): A list of (Polygon, weight) pairs, each polygon contained in P
        P (Polygon): The polygon clipping the arrangement

    Returns:
        Arrangement: The weighted arrangement; cell weights are sums of the weights of the containing regions
    """
    return Arrangement([r for r, _ in regions], [w for _, w in regions], P)
