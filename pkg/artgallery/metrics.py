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
from tqdm import tqdm
import numpy as np
from typing import List, Optional, Sequence


# Define metric utility functions for comparing solver runs

def relative_gap(lb: Optional[float], ub: Optional[float]) -> float:
    """
    The relative gap (ub - lb)/lb between the bounds of a run.

    Args:
        lb (float): The lower bound, at least 1
        ub (float): The upper bound, or None/inf when no integral solution was found

    Returns:
        float: The relative gap, infinite when there is no upper bound
    """
    if ub is None or lb is None or math.isinf(ub) or lb <= 0:
        return math.inf
    return (ub - lb)/lb


def gap_at(events: Sequence[dict], t: float) -> float:
    """
    The relative gap of a run at time `t`, from the last event logged at or before `t`.
    Runs without an event by then count as unsolved.
    """
    gap = math.inf
    for e in events:
        if e["t"] > t:
            break
        gap = relative_gap(e["lb"], e["ub"])
    return gap


def quartiles(values: Sequence[float]) -> List[float]:
    """
    Q0..Q4 of a list of values as order statistics (no interpolation), so infinite values
    are handled like any other.
    """
    if len(values) == 0:
        raise ValueError("cannot compute quartiles of an empty list")
    return np.percentile(np.asarray(values, dtype=float), [0, 25, 50, 75, 100], method="nearest").tolist()


def quartile_series(runs: Sequence[Sequence[dict]], timestamps: Sequence[float], disable_progress: bool = True) -> np.ndarray:
    """
    Quartiles of the relative gap across a batch of runs over time.

    Args:
        runs (list): One list of event dicts (with keys t, lb, ub) per run
        timestamps (list): Increasing time points (seconds) to evaluate the gaps at
        disable_progress (bool): Whether to hide the tqdm bar

    Returns:
        np.ndarray: Array of shape (len(timestamps), 5) with Q0..Q4 per timestamp
    """
    series = []
    for t in tqdm(timestamps, disable=disable_progress, desc="gap quartiles"):
        series.append(quartiles([gap_at(events, t) for events in runs]))
    return np.array(series, dtype=float).reshape(len(timestamps), 5)


def solved_fraction(gaps: Sequence[float]) -> float:
    if len(gaps) == 0:
        return 0.0
    return sum(1 for g in gaps if g == 0)/len(gaps)


def median_gap(gaps: Sequence[float]) -> float:
    return quartiles(gaps)[2]
