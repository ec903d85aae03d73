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
import math

import numpy as np
import pytest

from artgallery.metrics import gap_at, median_gap, quartile_series, quartiles, relative_gap, solved_fraction


EVENTS = [
    {"t": 0.0, "lb": 1, "ub": None},
    {"t": 1.0, "lb": 2, "ub": 4},
    {"t": 3.0, "lb": 3, "ub": 3},
]


# Tests
class TestGaps:
    def test_relative_gap(self):
        assert relative_gap(2, 3) == 0.5
        assert relative_gap(3, 3) == 0
        assert math.isinf(relative_gap(2, None))
        assert math.isinf(relative_gap(2, math.inf))

    def test_gap_at(self):
        assert math.isinf(gap_at(EVENTS, 0.5))
        assert gap_at(EVENTS, 1.0) == 1.0
        assert gap_at(EVENTS, 2.9) == 1.0
        assert gap_at(EVENTS, 10) == 0
        assert math.isinf(gap_at([{"t": 5.0, "lb": 1, "ub": 1}], 1.0))


class TestQuartiles:
    def test_order_statistics(self):
        assert quartiles([5, 1, 4, 2, 3]) == [1, 2, 3, 4, 5]
        assert quartiles([7]) == [7]*5

    def test_nearest_rank_on_even_counts(self):
        assert quartiles([4, 1, 3, 2]) == [1, 2, 3, 3, 4]
        assert quartiles([0, 1]) == [0, 0, 0, 1, 1]

    def test_infinite_values(self):
        q = quartiles([0, 0, math.inf, math.inf, math.inf])
        assert q[:2] == [0, 0]
        assert all(math.isinf(v) for v in q[2:])
        assert math.isinf(median_gap([0, math.inf, math.inf]))

    def test_empty(self):
        with pytest.raises(ValueError):
            quartiles([])

    def test_series(self):
        runs = [EVENTS, [{"t": 0.0, "lb": 2, "ub": 2}]]
        series = quartile_series(runs, [0.0, 2.0, 4.0])
        assert series.shape == (3, 5)
        assert series[0, 0] == 0
        assert np.isinf(series[0, 4])
        np.testing.assert_array_equal(series[2], np.zeros(5))

    def test_solved_fraction(self):
        assert solved_fraction([0, 0, 0.5, math.inf]) == 0.5
        assert solved_fraction([]) == 0.0
