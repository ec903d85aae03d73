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
from fractions import Fraction

import numpy as np
import pytest

import artgallery
from artgallery.bench import GenSpec, generate
from artgallery.geometry import make_point, make_polygon, sees, visibility_polygon
from artgallery.arrangement import Arrangement, overlay


def box(x0, y0, x1, y1):
    return make_polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def sample_points(P, n, seed):
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = P.bbox()
    points = []
    while len(points) < n:
        u, v = (int(k) for k in rng.integers(1, 10007, size=2))
        p = make_point(x0 + (x1 - x0)*Fraction(u, 10007), y0 + (y1 - y0)*Fraction(v, 10007))
        if P.contains(p):
            points.append(p)
    return points


P = box(0, 0, 5, 5)
A = box(1, 1, 3, 3)
B = box(2, 2, 4, 4)


# Tests
class TestOverlay:
    def test_empty_overlay_has_one_face(self):
        arr = overlay([], P)
        faces = arr.faces()
        assert len(faces) == 1
        assert faces[0].weight == 0
        assert P.contains(faces[0].point)

    def test_two_boxes(self):
        half = Fraction(1, 2)
        arr = overlay([(A, half), (B, half)], P)
        assert len(arr.faces()) == 4

        top = arr.max_cells()
        assert top[0].weight == 1
        assert all(c.labels == frozenset({0, 1}) for c in top)
        assert any(c.kind == "face" for c in top)

        bottom = arr.min_cells()
        assert bottom[0].weight == 0
        assert all(c.labels == frozenset() for c in bottom)

    def test_face_points_are_inside_their_regions(self):
        arr = overlay([(A, Fraction(1)), (B, Fraction(1))], P)
        for cell in arr.faces():
            assert (0 in cell.labels) == A.contains_strict(cell.point)
            assert (1 in cell.labels) == B.contains_strict(cell.point)

    def test_locate(self):
        arr = overlay([(A, Fraction(1)), (B, Fraction(1))], P)
        assert arr.locate(make_point(Fraction(5, 2), Fraction(5, 2))).labels == frozenset({0, 1})
        assert arr.locate(make_point(Fraction(3, 2), Fraction(3, 2))).labels == frozenset({0})
        assert arr.locate(make_point(Fraction(9, 2), Fraction(9, 2))).labels == frozenset()

        # closed regions: the edge of A inside B carries both labels
        cell = arr.locate(make_point(3, Fraction(5, 2)))
        assert cell.kind == "edge"
        assert cell.labels == frozenset({0, 1})

        corner = arr.locate(make_point(3, 3))
        assert corner.kind == "vertex"
        assert corner.labels == frozenset({0, 1})

    def test_custom_weight_function(self):
        arr = overlay([(A, Fraction(1)), (B, Fraction(1))], P)

        def only_a(labels):
            return Fraction(7) if labels == frozenset({0}) else Fraction(0)

        top = arr.max_cells(only_a)
        assert top[0].weight == 7
        assert all(c.labels == frozenset({0}) for c in top)

    def test_mismatched_weights(self):
        with pytest.raises(ValueError):
            Arrangement([A, B], [Fraction(1)], P)


class TestVisibilityOverlay:
    def test_coverage_matches_segment_tests(self):
        P = artgallery.load_instance("triangle_hole")
        guards = [make_point(0, 0), make_point(12, 0), make_point(6, 12)]
        arr = overlay([(visibility_polygon(g, P).region, Fraction(1)) for g in guards], P)
        for cell in arr.faces():
            seen = frozenset(i for i, g in enumerate(guards) if sees(g, cell.point, P))
            assert cell.labels == seen

    def test_every_point_seen_by_two_corners(self):
        P = artgallery.load_instance("triangle_hole")
        guards = [make_point(0, 0), make_point(12, 0), make_point(6, 12)]
        arr = overlay([(visibility_polygon(g, P).region, Fraction(1)) for g in guards], P)
        assert arr.min_cells()[0].weight == 2

    @pytest.mark.parametrize("cls", sorted(artgallery.GENERATORS))
    def test_located_labels_match_segment_tests(self, cls):
        P = generate(GenSpec(cls, 20, 0))
        vertices = P.vertices()
        guards = vertices[::len(vertices)//4][:4] + sample_points(P, 1, seed=5)
        arr = overlay([(visibility_polygon(g, P).region, Fraction(1)) for g in guards], P)
        for q in sample_points(P, 1000, seed=2):
            seen = frozenset(i for i, g in enumerate(guards) if sees(g, q, P))
            cell = arr.locate(q)
            assert cell.labels == seen
            assert cell.weight == len(seen)
