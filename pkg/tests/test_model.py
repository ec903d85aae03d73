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
import json
import tempfile
from fractions import Fraction

import numpy as np
import pytest

import artgallery
from artgallery.geometry import make_point
from artgallery.lp import solve_lp
from artgallery.model import (InfeasibleModelError, PointSet, VisibilityMatrix, build_model, classify_by_overlay,
                              classify_guard, cut_coefficient, cut_row, load_checkpoint, make_ec_cut, make_sc_cut,
                              save_checkpoint)


def triangle_hole():
    paths = artgallery.INSTANCES["triangle_hole"]
    guards, witnesses, _ = load_checkpoint(paths["checkpoint_path"])
    return artgallery.load_instance("triangle_hole"), guards, witnesses


# Tests
class TestPointSet:
    def test_ids_are_stable(self):
        s = PointSet([make_point(0, 0), make_point(1, 0)])
        assert s.add(make_point(0, 0)) == (0, False)
        assert s.add(make_point(Fraction(1, 2), 0)) == (2, True)
        assert len(s) == 3
        assert s[2] == make_point(Fraction(1, 2), 0)
        assert make_point(1, 0) in s
        assert s.index(make_point(1, 0)) == 1
        assert list(s)[0] == make_point(0, 0)


class TestVisibilityMatrix:
    def test_circulant_pattern(self):
        P, guards, witnesses = triangle_hole()
        matrix = VisibilityMatrix(P, guards, witnesses)
        assert matrix.shape == (3, 3)
        assert (matrix.data == ~np.eye(3, dtype=bool)).all()
        assert matrix.seen_by(0) == [1, 2]
        assert matrix.seen_from(2) == [0, 1]

    def test_growth(self):
        P, guards, witnesses = triangle_hole()
        matrix = VisibilityMatrix(P, guards[:2], witnesses)
        assert matrix.add_guards([guards[0], guards[2]]) == [2]
        assert matrix.add_witnesses([witnesses[0], make_point(6, 1)]) == [3]
        assert matrix.shape == (4, 3)
        # (6, 1) lies below the hole and sees the two bottom corners only
        assert matrix.data[3].tolist() == [True, True, False]


class TestCuts:
    def test_cut_constructors(self):
        pts = [make_point(i, 0) for i in range(5)]
        with pytest.raises(ValueError):
            make_sc_cut(pts[:2])
        with pytest.raises(ValueError):
            make_ec_cut(pts[:4])
        assert make_ec_cut(pts).rhs == 3
        assert make_sc_cut(pts[:3]).rhs == 2
        assert make_sc_cut(pts[:3]).key == make_sc_cut(pts[2::-1]).key

    def test_cut_coefficients(self):
        P, guards, witnesses = triangle_hole()
        sc = make_sc_cut(witnesses)
        ec = make_ec_cut(witnesses)
        for g in guards:
            assert classify_guard(g, witnesses, P) == 1
            assert classify_by_overlay(g, witnesses, P) == 1
            assert cut_coefficient(g, sc, P) == 1
            assert cut_coefficient(g, ec, P) == 1

        # a point below the hole sees only the bottom hole edge
        low = make_point(6, 1)
        assert classify_guard(low, witnesses, P) == 1
        row = make_sc_cut([make_point(3, 1), make_point(9, 1), make_point(6, 2)])
        assert cut_coefficient(low, row, P) == 2
        assert cut_coefficient(make_point(0, 0), row, P) == 2
        assert cut_coefficient(make_point(6, 12), row, P) == 0

        matrix = VisibilityMatrix(P, guards, witnesses)
        assert cut_row(matrix, sc) == {0: 1, 1: 1, 2: 1}

    def test_cut_row_for_unknown_witnesses(self):
        P, guards, witnesses = triangle_hole()
        matrix = VisibilityMatrix(P, guards, witnesses[:1])
        assert cut_row(matrix, make_sc_cut(witnesses)) == {0: 1, 1: 1, 2: 1}


class TestBuildModel:
    def test_sc_cut_lifts_relaxation(self):
        P, guards, witnesses = triangle_hole()
        matrix = VisibilityMatrix(P, guards, witnesses)
        assert solve_lp(build_model(matrix)).objective == Fraction(3, 2)

        m = build_model(matrix, [make_sc_cut(witnesses)])
        assert m.row(("sc", 0)).rhs == 2
        assert solve_lp(m).objective == 2

    def test_ec_cut_lifts_relaxation(self):
        P, guards, witnesses = triangle_hole()
        matrix = VisibilityMatrix(P, guards, witnesses)
        assert solve_lp(build_model(matrix, [make_ec_cut(witnesses)])).objective == 2

    def test_unseen_witness(self):
        P, guards, witnesses = triangle_hole()
        matrix = VisibilityMatrix(P, guards[:1], witnesses[:1])
        with pytest.raises(InfeasibleModelError):
            build_model(matrix)


class TestCheckpoint:
    def test_save_and_load(self):
        P, guards, witnesses = triangle_hole()
        cuts = [make_sc_cut(witnesses), make_ec_cut(witnesses, certificate=2)]
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, "nested", "checkpoint.json")
            save_checkpoint(path, guards, witnesses, cuts)
            with open(path) as f:
                data = json.load(f)
            assert data["witnesses"][0] == ["15/2", "5"]

            g, w, c = load_checkpoint(path)
        assert g == guards
        assert w == witnesses
        assert [cut.key for cut in c] == [cut.key for cut in cuts]
        assert [cut.rhs for cut in c] == [2, 2]

    def test_unknown_cut_kind(self):
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, "bad.json")
            with open(path, "w") as f:
                json.dump({"guards": [], "witnesses": [], "cuts": [{"kind": "xx", "witnesses": [], "rhs": 1}]}, f)
            with pytest.raises(ValueError):
                load_checkpoint(path)
