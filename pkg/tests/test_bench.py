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
import csv
import json
import math
import tempfile

import mock
import numpy as np
import pytest

import artgallery
from artgallery.bench import GenerationError, GenSpec, format_table, generate, run_batch, solve_instance


def fake_solve(job):
    spec, name, _ = job
    row = {"class": spec.cls, "size": spec.target_vertices, "seed": spec.seed, "config": name,
           "solved": True, "lb": 2, "ub": 2, "gap": 0.0, "time_s": 1.0}
    events = [{"t": 0.0, "lb": 1, "ub": None, "tag": "init"}, {"t": 1.0, "lb": 2, "ub": 2, "tag": "optimal"}]
    return row, events


# Tests
class TestGenSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GenSpec("fractal", 20, 0)
        with pytest.raises(ValueError):
            GenSpec("koch", 8, 0)

    def test_name_and_range(self):
        spec = GenSpec("koch", 20, 1)
        assert spec.name == "koch-20-1"
        assert spec.vertex_range == (18, 22)


class TestGenerators:
    @pytest.mark.parametrize("cls", sorted(artgallery.GENERATORS))
    def test_deterministic_and_in_range(self, cls):
        spec = GenSpec(cls, 20, 0)
        first = generate(spec)
        low, high = spec.vertex_range
        assert low <= len(first.vertices()) <= high
        assert first.vertices() == generate(spec).vertices()
        assert first.area() > 0

    def test_koch_adds_three_vertices_per_bump(self):
        polygon = generate(GenSpec("koch", 20, 4))
        assert len(polygon.vertices()) == 18
        assert polygon.holes == ()

    def test_orthogonal_edges_are_axis_parallel(self):
        polygon = generate(GenSpec("orthogonal", 16, 2))
        for a, b in polygon.edges():
            assert a.x == b.x or a.y == b.y


class TestBatch:
    def test_run_batch(self):
        specs = [GenSpec("koch", 12, s) for s in range(3)]
        configs = {"lp": {"mode": "lp", "time_limit_s": 10}, "ip": {"mode": "ip", "time_limit_s": 10}}
        with tempfile.TemporaryDirectory() as tmp_dir:
            with mock.patch("artgallery.bench.solve_instance", side_effect=fake_solve) as solve:
                result = run_batch(specs, configs, output_dir=os.path.join(tmp_dir, "out"), n_timestamps=3)
            assert solve.call_count == 6

            with open(os.path.join(tmp_dir, "out", "results.csv")) as f:
                rows = list(csv.DictReader(f))
            assert len(rows) == 6
            assert rows[0]["class"] == "koch"
            with open(os.path.join(tmp_dir, "out", "series.json")) as f:
                series = json.load(f)
            assert series["lp"]["timestamps"] == [0, 5, 10]
            assert series["lp"]["quartiles"][0] == [None]*5
            assert os.path.exists(os.path.join(tmp_dir, "out", "table.txt"))

        assert [r["config"] for r in result.rows] == ["lp"]*3 + ["ip"]*3
        assert set(result.series) == {"lp", "ip"}
        assert result.series["ip"].quartiles.shape == (3, 5)
        assert np.isinf(result.series["ip"].quartiles[0]).all()
        assert (result.series["ip"].quartiles[1:] == 0).all()
        assert "100%" in result.table

    def test_invalid_config_fails_before_solving(self):
        with mock.patch("artgallery.bench.solve_instance") as solve:
            with pytest.raises(ValueError):
                run_batch([GenSpec("koch", 12, 0)], {"bad": {"mode": "milp"}})
        solve.assert_not_called()

    def test_failures_are_recorded(self):
        spec = GenSpec("simple", 12, 0)
        with mock.patch("artgallery.bench.generate", side_effect=GenerationError("boom")):
            row, events = solve_instance((spec, "lp", {}))
        assert row["error"] == "boom"
        assert not row["solved"]
        assert math.isinf(row["gap"])
        assert events == []

    def test_solve_instance(self):
        spec = GenSpec("simple", 12, 0)
        with mock.patch("artgallery.bench.generate", return_value=artgallery.load_instance("square")):
            row, events = solve_instance((spec, "lp", {"time_limit_s": 60}))
        assert "error" not in row
        assert row["solved"]
        assert row["lb"] == row["ub"] == 1
        assert events[-1]["tag"] == "optimal"

    @pytest.mark.slow
    def test_koch_batch(self):
        specs = [GenSpec("koch", 60, s) for s in range(10)]
        configs = {"sc3+ec": {"mode": "lp", "cuts": "sc3+ec", "time_limit_s": 60},
                   "none": {"mode": "lp", "cuts": "none", "time_limit_s": 60}}
        result = run_batch(specs, configs, ncpu=2)
        assert not any("error" in r for r in result.rows)
        solved = {name: sum(r["solved"] for r in result.rows if r["config"] == name) for name in configs}
        assert solved["sc3+ec"] == len(specs)
        assert solved["none"] <= solved["sc3+ec"]
        for r in result.rows:
            if r["config"] == "sc3+ec":
                assert r["gap"] == 0
            if r["solved"]:
                assert r["ub"] <= 60//3

    def test_format_table(self):
        rows = [fake_solve((GenSpec("spike", 40, s), "lp", {}))[0] for s in range(2)]
        rows.append({**rows[0], "seed": 2, "solved": False, "gap": math.inf})
        table = format_table(rows)
        lines = table.splitlines()
        assert len(lines) == 2
        assert "spike" in lines[1]
        assert "67%" in lines[1]
