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

import mock
import numpy as np

import artgallery
from artgallery.geometry import make_point, sees
from artgallery.arrangement import Cell
from artgallery.lp import solve_lp
from artgallery.model import VisibilityMatrix, build_model, cut_row, load_checkpoint
from artgallery.facets import feasible_points
from artgallery.separation import (candidate_pool, dual_separate, max_visible_witnesses, primal_separate,
                                   separate_cuts, separate_ec, separate_sc)


def load_matrix(name, polygon=None):
    guards, witnesses, _ = load_checkpoint(artgallery.INSTANCES[name]["checkpoint_path"])
    return VisibilityMatrix(artgallery.load_instance(polygon or name), guards, witnesses)


def uniform(matrix, value):
    return {g: value for g in range(len(matrix.guards))}


# Tests
class TestPrimalSeparation:
    def test_half_solution_covers_triangle(self):
        matrix = load_matrix("triangle_hole")
        res = primal_separate(matrix, uniform(matrix, Fraction(1, 2)))
        assert not res.found
        assert res.weight == 1

    def test_single_guard_leaves_points_uncovered(self):
        matrix = load_matrix("triangle_hole")
        x = {0: Fraction(1), 1: Fraction(0), 2: Fraction(0)}
        res = primal_separate(matrix, x, max_points=5)
        assert res.found
        assert res.weight == 0
        assert 0 < len(res.points) <= 5
        g = matrix.guards[0]
        for p in res.points:
            assert p not in matrix.witnesses
            assert not sees(g, p, matrix.P)

    def test_pocket_has_underguarded_points(self):
        matrix = load_matrix("spiked_star", polygon="spiked_pocket")
        res = primal_separate(matrix, uniform(matrix, Fraction(1, 3)))
        assert res.found
        assert res.weight < 1
        for p in res.points:
            assert sum(sees(g, p, matrix.P) for g in matrix.guards) <= 2


class TestDualSeparation:
    def test_star_center_is_overpacked(self):
        matrix = load_matrix("spiked_star")
        sol = solve_lp(build_model(matrix))
        assert sol.objective == Fraction(4, 3)

        y = {w: Fraction(1, 3) for w in range(len(matrix.witnesses))}
        res = dual_separate(matrix, y)
        assert res.found
        assert res.weight == Fraction(4, 3)
        for p in res.points:
            assert all(sees(p, w, matrix.P) for w in matrix.witnesses)

    def test_no_guard_above_one(self):
        matrix = load_matrix("spiked_star")
        res = dual_separate(matrix, {0: Fraction(1)})
        assert not res.found
        assert res.weight == 1

    def test_cut_duals_add_weight(self):
        matrix = load_matrix("triangle_hole")
        cuts = separate_sc(matrix, uniform(matrix, Fraction(1, 2)))
        # a point seeing all three witnesses would get 2*z, one seeing two gets z
        res = dual_separate(matrix, {}, cuts, {0: Fraction(3, 4)})
        assert not res.found
        assert res.weight == Fraction(3, 4)

        res = dual_separate(matrix, {0: Fraction(1, 2)}, cuts, {0: Fraction(3, 4)})
        assert res.found
        assert res.weight == Fraction(5, 4)

    def test_existing_guards_are_skipped(self):
        matrix = load_matrix("triangle_hole")
        corner = matrix.guards[0]
        inner = make_point(6, 1)
        cells = [Cell("face", inner, frozenset({0}), Fraction(9, 8)),
                 Cell("face", make_point(1, 1), frozenset(), Fraction(0)),
                 Cell("vertex", corner, frozenset({0, 1}), Fraction(5, 4))]
        with mock.patch("artgallery.separation.overlay") as arrangement:
            arrangement.return_value.cells.return_value = cells
            res = dual_separate(matrix, {0: Fraction(1)})
        assert res.found
        assert res.points == [inner]
        assert res.weight == Fraction(9, 8)

    def test_added_guards_are_not_found_again(self):
        matrix = load_matrix("spiked_star")
        y = {w: Fraction(1, 3) for w in range(len(matrix.witnesses))}
        first = dual_separate(matrix, y)
        matrix.add_guards(first.points)
        second = dual_separate(matrix, y)
        assert not set(second.points) & set(matrix.guards)
        assert not second.found or second.weight > 1


class TestCutSeparation:
    def test_candidate_pool(self):
        matrix = load_matrix("triangle_hole")
        assert candidate_pool(matrix, uniform(matrix, Fraction(1, 2))) == [0, 1, 2]
        assert candidate_pool(matrix, uniform(matrix, Fraction(1))) == []

    def test_sc_cut_on_triangle(self):
        matrix = load_matrix("triangle_hole")
        x = uniform(matrix, Fraction(1, 2))
        cuts = separate_sc(matrix, x)
        assert len(cuts) == 1
        assert cuts[0].kind == "sc"
        assert set(cuts[0].witnesses) == set(matrix.witnesses)
        assert separate_sc(matrix, x, existing=cuts) == []

        m = build_model(matrix, cuts)
        assert solve_lp(m).objective == 2

    def test_sc_cuts_are_valid(self):
        matrix = load_matrix("triangle_hole")
        cuts = separate_sc(matrix, uniform(matrix, Fraction(1, 2)), sizes=(3,))
        X = feasible_points(matrix.data)
        for cut in cuts:
            row = cut_row(matrix, cut)
            coeffs = np.array([row.get(g, 0) for g in range(len(matrix.guards))])
            assert (X @ coeffs >= cut.rhs).all()

    def test_ec_cut_on_triangle(self):
        matrix = load_matrix("triangle_hole")
        cuts = separate_ec(matrix, uniform(matrix, Fraction(1, 2)))
        assert len(cuts) == 1
        assert cuts[0].rhs == 2
        assert cuts[0].certificate == 2
        assert separate_ec(matrix, uniform(matrix, Fraction(1, 2)), existing=cuts) == []

    def test_ec_cut_on_pentagon(self):
        matrix = load_matrix("pentagon_ring")
        sol = solve_lp(build_model(matrix))
        assert sol.objective == Fraction(5, 2)

        cuts = separate_ec(matrix, dict(sol.primal))
        assert len(cuts) == 1
        assert cuts[0].rhs == 3
        assert len(cuts[0].witnesses) == 5
        assert solve_lp(build_model(matrix, cuts)).objective == 3

    def test_float_values(self):
        matrix = load_matrix("pentagon_ring")
        cuts = separate_ec(matrix, uniform(matrix, 0.5))
        assert len(cuts) == 1

    def test_max_visible_witnesses(self):
        matrix = load_matrix("pentagon_ring")
        assert max_visible_witnesses(list(matrix.witnesses), matrix) == 2

    def test_separate_cuts_kinds(self):
        matrix = load_matrix("triangle_hole")
        x = uniform(matrix, Fraction(1, 2))
        assert [c.kind for c in separate_cuts(matrix, x, ("sc3", "ec"))] == ["sc", "ec"]
        assert [c.kind for c in separate_cuts(matrix, x, ("ec",))] == ["ec"]
        assert separate_cuts(matrix, x, ()) == []

    def test_cuts_ignore_guards_without_values(self):
        matrix = load_matrix("triangle_hole")
        x = uniform(matrix, Fraction(1, 2))
        matrix.add_guards([make_point(6, 1)])
        assert [c.kind for c in separate_cuts(matrix, x, ("sc3", "ec"))] == ["sc", "ec"]

    def test_subset_limit_warning(self, caplog):
        matrix = load_matrix("pentagon_ring")
        x = uniform(matrix, Fraction(1, 2))
        assert len(candidate_pool(matrix, x)) == 5
        separate_sc(matrix, x, max_subsets=10)
        assert "stopped after" not in caplog.text

        separate_sc(matrix, x, max_subsets=4)
        assert "stopped after 4 subsets" in caplog.text
