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
import math
import itertools

import mock
import numpy as np
import pytest
import jsonschema

import artgallery
from artgallery.model import InfeasibleModelError, cut_row, load_checkpoint, make_sc_cut
from artgallery.facets import feasible_points
from artgallery.engine import REASONS, SolveConfig, Solver, chvatal_bound, run_ip_mode, run_lp_mode
from artgallery.utils import read_json


def checkpoint(name):
    guards, witnesses, _ = load_checkpoint(artgallery.INSTANCES[name]["checkpoint_path"])
    return guards, witnesses


def schema(name):
    return read_json(os.path.join(artgallery.SCHEMA_DIR, name))


def assert_cuts_hold(state):
    """Every cut in the pool holds for every binary cover of its witnesses by the final guards."""
    matrix = state.matrix
    for cut in state.cuts:
        row = cut_row(matrix, cut)
        rows = [matrix.witnesses.index(w) for w in cut.witnesses]
        # a violating cover uses fewer guards than the right-hand side
        for size in range(1, cut.rhs):
            for subset in itertools.combinations(sorted(row), size):
                if matrix.data[np.ix_(rows, list(subset))].any(axis=1).all():
                    assert sum(row[g] for g in subset) >= cut.rhs, (cut, subset)
        if len(matrix.guards) <= 16:
            coeffs = np.array([row.get(g, 0) for g in range(len(matrix.guards))])
            assert (feasible_points(matrix.data) @ coeffs >= cut.rhs).all()


# Tests
class TestSolveConfig:
    def test_defaults(self):
        config = SolveConfig()
        assert config.mode == "lp"
        assert config.cuts == "sc3+ec"
        assert config.cut_kinds == ("sc3", "ec")
        assert config.to_dict()["time_limit_s"] == 600.0

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            SolveConfig(mode="milp")
        with pytest.raises(ValueError):
            SolveConfig(cuts="sc5")
        with pytest.raises(ValueError):
            SolveConfig(arithmetic="decimal")
        with pytest.raises(ValueError):
            SolveConfig(time_limit_s=-1)
        with pytest.raises(ValueError):
            SolveConfig(max_subsets=0)

    def test_from_dict(self):
        config = SolveConfig.from_dict({"mode": "ip", "cuts": "none"})
        assert config.mode == "ip"
        assert config.cut_kinds == ()
        with pytest.raises(ValueError):
            SolveConfig.from_dict({"modes": "ip"})

    def test_deprecated_time_limit_key(self, caplog):
        config = SolveConfig.from_dict({"time_limit": 5})
        assert config.time_limit_s == 5
        assert "DEPRECATION" in caplog.text


class TestSolver:
    def test_square_is_solved_by_one_guard(self):
        P = artgallery.load_instance("square")
        state = run_lp_mode(P, time_limit_s=60)
        assert state.reason == "optimal"
        assert state.lb == state.ub == 1
        assert state.gap == 0
        assert len(state.best_guards) == 1
        assert state.log.events[0].tag == "init"
        assert state.log.events[-1].tag == "optimal"

    def test_ip_mode_on_triangle_with_hole(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        state = run_ip_mode(P, guards=guards, witnesses=witnesses, cuts="none", time_limit_s=600)
        assert state.reason == "optimal"
        assert state.lb == state.ub == 2

    def test_lp_mode_without_cuts_stalls(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        state = run_lp_mode(P, guards=guards, witnesses=witnesses, cuts="none", time_limit_s=600)
        assert state.reason == "stalled"
        assert state.lb == 2
        assert math.isinf(state.ub)
        assert math.isinf(state.gap)
        assert state.log.events[-1].tag == "stalled"

    def test_lp_mode_separates_cuts(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        state = run_lp_mode(P, guards=guards, witnesses=witnesses, cuts="sc3", time_limit_s=600)
        assert state.reason == "optimal"
        assert state.lb == state.ub == 2
        assert len(state.best_guards) == 2
        assert any(c.kind == "sc" for c in state.cuts)
        assert_cuts_hold(state)

    def test_lp_mode_with_ec_cut_on_pentagon(self):
        P = artgallery.load_instance("pentagon_ring")
        guards, witnesses = checkpoint("pentagon_ring")
        state = run_lp_mode(P, guards=guards, witnesses=witnesses, cuts="ec", time_limit_s=600)
        assert state.reason in ("optimal", "stalled")
        assert any(c.kind == "ec" and c.rhs == 3 and len(c.witnesses) == 5 for c in state.cuts)
        # the cut alone forces three guards, whatever guards were added
        assert state.lb >= 3
        assert state.lb <= state.ub
        assert_cuts_hold(state)

    @pytest.mark.parametrize("cuts", ["ec", "sc3", "sc3+ec"])
    def test_lp_mode_from_vertices(self, cuts):
        P = artgallery.load_instance("triangle_hole")
        state = run_lp_mode(P, cuts=cuts, time_limit_s=120)
        assert state.reason in REASONS
        assert 1 <= state.lb <= 2
        assert state.ub >= 2
        assert len(state.matrix.guards) >= len(P.vertices())
        assert_cuts_hold(state)

    def test_ip_mode_from_vertices(self):
        P = artgallery.load_instance("triangle_hole")
        state = run_ip_mode(P, time_limit_s=120)
        assert state.reason in REASONS
        assert state.ub == 2
        assert state.lb <= 2
        for g in state.best_guards:
            assert P.contains(g)
        assert_cuts_hold(state)

    def test_cut_names_reach_the_config(self):
        P = artgallery.load_instance("square")
        solver = Solver(P, cuts="none")
        assert solver.config.cuts == "none"
        assert solver.state.cuts == []

        cut = make_sc_cut(P.vertices()[:3])
        solver = Solver(P, SolveConfig(cuts="ec"), initial_cuts=[cut])
        assert solver.config.cuts == "ec"
        assert solver.state.cuts == [cut]

    def test_bounds_are_monotone(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        state = run_ip_mode(P, guards=guards, witnesses=witnesses, time_limit_s=600)
        lbs = [e.lb for e in state.log.events]
        ubs = [e.ub for e in state.log.events]
        assert lbs == sorted(lbs)
        assert ubs == sorted(ubs, reverse=True)
        ts = [e.t for e in state.log.events]
        assert ts == sorted(ts)

    def test_time_limit(self):
        P = artgallery.load_instance("square")
        clock = mock.Mock(side_effect=itertools.count(0, 100))
        state = Solver(P, time_limit_s=1, clock=clock).run()
        assert state.reason == "time_limit"
        assert [e.tag for e in state.log.events] == ["init", "time_limit"]

    def test_keyword_arguments_override_config(self):
        P = artgallery.load_instance("square")
        solver = Solver(P, SolveConfig(mode="lp", cuts="ec"), mode="ip")
        assert solver.config.mode == "ip"
        assert solver.config.cuts == "ec"

    def test_uncoverable_witness(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        with pytest.raises(InfeasibleModelError):
            Solver(P, guards=guards[:1], witnesses=witnesses[:1]).run()

    def test_run_record_matches_schema(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        config = SolveConfig(mode="ip", cuts="none", time_limit_s=600)
        state = Solver(P, config, guards=guards, witnesses=witnesses).run()
        record = state.to_record("triangle_hole", config)
        jsonschema.validate(record, schema("run_record.schema.json"))
        assert record["result"]["ub"] == 2
        assert len(record["result"]["guards"]) == 2
        assert len(record["result"]["witnesses"]) == len(state.matrix.witnesses) >= 3

        stalled = run_lp_mode(P, guards=guards, witnesses=witnesses, cuts="none", time_limit_s=600)
        record = stalled.to_record("triangle_hole", SolveConfig(cuts="none"))
        jsonschema.validate(record, schema("run_record.schema.json"))
        assert record["result"]["ub"] is None
        assert record["result"]["gap"] is None
        assert record["result"]["reason"] == "stalled"


class TestChvatalBound:
    def test_bound(self):
        assert chvatal_bound(artgallery.load_instance("square")) == 1
        assert chvatal_bound(artgallery.load_instance("triangle_hole")) == 2
        assert chvatal_bound(artgallery.load_instance("spiked_star")) == 5

    def test_solution_within_bound(self):
        P = artgallery.load_instance("triangle_hole")
        guards, witnesses = checkpoint("triangle_hole")
        state = run_ip_mode(P, guards=guards, witnesses=witnesses, cuts="none", time_limit_s=600)
        assert state.ub <= chvatal_bound(P)
        for g in state.best_guards:
            assert P.contains(g)
