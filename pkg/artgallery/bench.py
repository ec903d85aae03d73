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

"""
Benchmark instance generators and the batch harness.

The four generator classes are structural look-alikes of common benchmark families
(fractal-like, floorplan-like orthogonal, random simple and spiked polygons); they do not
reproduce any published instance set.
"""

# Imports
import os
import csv
import math
import time
import logging
from fractions import Fraction
from multiprocessing import Pool
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from tqdm import tqdm

import artgallery
from artgallery.geometry import Point, Polygon, PolygonError, make_point, make_polygon, properly_cross
from artgallery.engine import SolveConfig, Solver
from artgallery.metrics import median_gap, quartile_series, solved_fraction
from artgallery.utils import progress_disabled, to_json_number, write_json


MAX_RETRIES = 20
CSV_FIELDS = ["class", "size", "seed", "config", "solved", "lb", "ub", "gap", "time_s"]


class GenerationError(ValueError):
    """Raised when no valid polygon was produced within the retry budget."""


@dataclass(frozen=True)
class GenSpec():
    cls: str
    target_vertices: int
    seed: int

    def __post_init__(self):
        if self.cls not in artgallery.GENERATORS:
            raise ValueError(f"unknown generator class '{self.cls}', expected one of {list(artgallery.GENERATORS)}")
        if self.target_vertices < 12:
            raise ValueError("target_vertices must be at least 12")

    @property
    def vertex_range(self) -> Tuple[int, int]:
        return math.ceil(0.9*self.target_vertices), math.floor(1.1*self.target_vertices)

    @property
    def name(self) -> str:
        return f"{self.cls}-{self.target_vertices}-{self.seed}"


def _try_polygon(outer, holes=()) -> Optional[Polygon]:
    try:
        return make_polygon(outer, holes)
    except PolygonError:
        return None


# Generators
def koch_polygon(target: int, rng: np.random.Generator, heights: Sequence[Fraction] = (Fraction(1, 5), Fraction(3, 10),
                 Fraction(2, 5)), inward_probability: float = 0.3) -> Polygon:
    """
    Randomized Koch-style polygon: starting from a triangle, one of the longest edges is
    repeatedly replaced by four edges with a bump of random height pointing out of (or, with
    `inward_probability`, into) the polygon. Each replacement adds three vertices.
    """
    low, _ = math.ceil(0.9*target), math.floor(1.1*target)
    ring = [make_point(0, 0), make_point(27, 0), make_point(Fraction(27, 2), 23)]
    failures = 0
    while len(ring) < low:
        lengths = [(ring[(i + 1) % len(ring)].x - ring[i].x)**2 + (ring[(i + 1) % len(ring)].y - ring[i].y)**2
                   for i in range(len(ring))]
        longest = sorted(range(len(ring)), key=lambda i: (-lengths[i], i))[:3]
        i = longest[int(rng.integers(len(longest)))]
        a, b = ring[i], ring[(i + 1) % len(ring)]
        dx, dy = b.x - a.x, b.y - a.y
        h = heights[int(rng.integers(len(heights)))]
        sign = -1 if rng.random() < inward_probability else 1
        p1 = Point(a.x + dx/3, a.y + dy/3)
        p3 = Point(a.x + 2*dx/3, a.y + 2*dy/3)
        # (dy, -dx) points out of a counterclockwise ring
        apex = Point((a.x + b.x)/2 + sign*h*dy, (a.y + b.y)/2 - sign*h*dx)
        candidate = ring[:i + 1] + [p1, apex, p3] + ring[i + 1:]
        if _try_polygon(candidate) is None:
            failures += 1
            if failures > 10*target:
                raise GenerationError("koch generator could not place another bump")
            continue
        ring = candidate
    return make_polygon(ring)


def _cell_corners(cells: Set[Tuple[int, int]]) -> Optional[int]:
    """Number of polygon corners of a union of unit cells, None if it pinches at a vertex."""
    corners = 0
    points = {(i + di, j + dj) for i, j in cells for di in (0, 1) for dj in (0, 1)}
    for x, y in points:
        around = [(x - 1, y - 1) in cells, (x, y - 1) in cells, (x, y) in cells, (x - 1, y) in cells]
        k = sum(around)
        if k == 2 and around[0] == around[2]:
            return None
        if k in (1, 3):
            corners += 1
    return corners


def _has_hole(cells: Set[Tuple[int, int]]) -> bool:
    xs = [i for i, _ in cells]
    ys = [j for _, j in cells]
    x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    seen = {(x0, y0)}
    stack = [(x0, y0)]
    while stack:
        i, j = stack.pop()
        for n in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if x0 <= n[0] <= x1 and y0 <= n[1] <= y1 and n not in cells and n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) + len(cells) < (x1 - x0 + 1)*(y1 - y0 + 1)


def _trace_cells(cells: Set[Tuple[int, int]], xs: Dict[int, int], ys: Dict[int, int]) -> List[Point]:
    nxt: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for i, j in cells:
        if (i, j - 1) not in cells:
            nxt[(i, j)] = (i + 1, j)
        if (i + 1, j) not in cells:
            nxt[(i + 1, j)] = (i + 1, j + 1)
        if (i, j + 1) not in cells:
            nxt[(i + 1, j + 1)] = (i, j + 1)
        if (i - 1, j) not in cells:
            nxt[(i, j + 1)] = (i, j)
    start = min(nxt)
    loop = [start]
    while nxt[loop[-1]] != start:
        loop.append(nxt[loop[-1]])
    # drop vertices in the middle of straight runs
    corners = [v for k, v in enumerate(loop)
               if (v[0] - loop[k - 1][0], v[1] - loop[k - 1][1]) !=
               (loop[(k + 1) % len(loop)][0] - v[0], loop[(k + 1) % len(loop)][1] - v[1])]
    return [make_point(xs[i], ys[j]) for i, j in corners]


def orthogonal_polygon(target: int, rng: np.random.Generator, min_width: int = 2, max_width: int = 9) -> Polygon:
    """
    Floorplan-like orthogonal polygon: a union of grid cells grown one cell at a time from a
    single room, keeping the outline simple and hole-free, with random row heights and
    column widths between `min_width` and `max_width`.
    """
    low, high = math.ceil(0.9*target), math.floor(1.1*target)
    cells = {(0, 0)}
    corners = 4
    failures = 0
    while not (low <= corners <= high):
        frontier = sorted({(i + di, j + dj) for i, j in cells for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1))} - cells)
        c = frontier[int(rng.integers(len(frontier)))]
        grown = cells | {c}
        count = _cell_corners(grown)
        if count is None or count > high or _has_hole(grown):
            failures += 1
            if failures > 50*target:
                raise GenerationError("orthogonal generator got stuck")
            continue
        cells, corners = grown, count

    lo_i = min(i for i, _ in cells)
    hi_i = max(i for i, _ in cells) + 1
    lo_j = min(j for _, j in cells)
    hi_j = max(j for _, j in cells) + 1
    widths = rng.integers(min_width, max_width + 1, size=hi_i - lo_i)
    heights = rng.integers(min_width, max_width + 1, size=hi_j - lo_j)
    xs = {lo_i + k: int(v) for k, v in enumerate(np.concatenate([[0], np.cumsum(widths)]))}
    ys = {lo_j + k: int(v) for k, v in enumerate(np.concatenate([[0], np.cumsum(heights)]))}
    return make_polygon(_trace_cells(cells, xs, ys))


def simple_polygon(target: int, rng: np.random.Generator, scale: int = 100) -> Polygon:
    """
    Random simple polygon: `target` distinct random integer points visited in random order,
    with crossings removed by 2-opt moves (reversing the chain between two crossing edges).
    """
    n = target
    coords: Set[Tuple[int, int]] = set()
    while len(coords) < n:
        coords.add((int(rng.integers(0, scale*n)), int(rng.integers(0, scale*n))))
    points = [make_point(x, y) for x, y in sorted(coords)]
    ring = [points[int(k)] for k in rng.permutation(n)]

    changed = True
    moves = 0
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                a, b = ring[i], ring[i + 1]
                c, d = ring[j], ring[(j + 1) % n]
                if properly_cross(a, b, c, d):
                    ring[i + 1:j + 1] = reversed(ring[i + 1:j + 1])
                    changed = True
                    moves += 1
        if moves > 100*n*n:
            raise GenerationError("2-opt untangling did not converge")
    polygon = _try_polygon(ring)
    if polygon is None:
        raise GenerationError("random points produced a degenerate polygon")
    return polygon


def _circle_point(theta: float, radius: int) -> Point:
    # rational parametrization, so the point lies exactly on the circle
    t = Fraction(math.tan(theta/2)).limit_denominator(10**4)
    return make_point(radius*(1 - t*t)/(1 + t*t), radius*2*t/(1 + t*t))


def spike_polygon(target: int, rng: np.random.Generator, hole_probability: float = 0.5, max_holes: int = 2,
                  spike_lengths: Sequence[Fraction] = (Fraction(3, 2), Fraction(2), Fraction(5, 2)),
                  spike_fraction: float = 0.35) -> Polygon:
    """
    Spike polygon: a convex body with points on a circle, thin triangular spikes erected on
    a random subset of its edges, and up to `max_holes` small triangular holes (each present
    with `hole_probability`) near the center.
    """
    radius = 1000
    n_holes = int(sum(rng.random() < hole_probability for _ in range(max_holes)))
    n_spikes = int(round(spike_fraction*target))
    n_base = target - n_spikes - 3*n_holes
    if n_base < max(n_spikes, 6):
        raise GenerationError(f"target {target} is too small for {n_spikes} spikes and {n_holes} holes")

    step = 2*math.pi/n_base
    thetas = [-math.pi + step*(k + 0.5) + step*0.3*(rng.random() - 0.5) for k in range(n_base)]
    base = [_circle_point(th, radius) for th in thetas]
    spiked = set(int(k) for k in rng.choice(n_base, size=n_spikes, replace=False))
    outer: List[Point] = []
    for k in range(n_base):
        a, b = base[k], base[(k + 1) % n_base]
        outer.append(a)
        if k in spiked:
            t = spike_lengths[int(rng.integers(len(spike_lengths)))]
            dx, dy = b.x - a.x, b.y - a.y
            outer.append(Point((a.x + b.x)/2 + t*dy, (a.y + b.y)/2 - t*dx))

    size = radius//10
    slots = [(i*3*size, j*3*size) for i in (-1, 0, 1) for j in (-1, 0, 1)]
    holes = []
    for k in rng.choice(len(slots), size=n_holes, replace=False):
        cx, cy = slots[int(k)]
        holes.append([(cx - size, cy - size), (cx + size, cy - size), (cx, cy + size)])
    polygon = _try_polygon(outer, holes)
    if polygon is None:
        raise GenerationError("spikes overlap")
    return polygon


def generate(spec: GenSpec, **kwargs) -> Polygon:
    """
    Generate a polygon of the given class, deterministically from the seed.

    Args:
        spec (GenSpec): Class, target vertex count and seed
        kwargs (dict): Knobs passed to the class generator

    Returns:
        Polygon: A valid polygon with a vertex count within 10% of the target
    """
    rng = np.random.default_rng(spec.seed)
    generator = artgallery.GENERATORS[spec.cls]
    low, high = spec.vertex_range
    for attempt in range(MAX_RETRIES):
        try:
            polygon = generator(spec.target_vertices, rng, **kwargs)  # type: ignore[operator]
        except GenerationError as e:
            logging.debug(f"{spec.name}: attempt {attempt} failed ({e})")
            continue
        n = len(polygon.vertices())
        if low <= n <= high:
            return polygon
        logging.debug(f"{spec.name}: attempt {attempt} produced {n} vertices")
    raise GenerationError(f"could not generate {spec.name} within {MAX_RETRIES} attempts")


# Batch harness
@dataclass
class QuartileSeries():
    """Q0..Q4 of the relative gap across the runs of one config, per timestamp."""
    config: str
    timestamps: List[float]
    quartiles: np.ndarray

    def to_dict(self) -> dict:
        return {"config": self.config, "timestamps": list(self.timestamps),
                "quartiles": [[to_json_number(float(v)) for v in row] for row in self.quartiles]}


@dataclass
class BatchResult():
    rows: List[dict] = field(default_factory=list)
    events: List[List[dict]] = field(default_factory=list)
    series: Dict[str, QuartileSeries] = field(default_factory=dict)
    table: str = ""


def solve_instance(job: Tuple[GenSpec, str, dict]) -> Tuple[dict, List[dict]]:
    """Generate and solve one instance; failures are recorded in the row instead of raised."""
    spec, config_name, config_values = job
    row = {"class": spec.cls, "size": spec.target_vertices, "seed": spec.seed, "config": config_name,
           "solved": False, "lb": None, "ub": None, "gap": math.inf, "time_s": 0.0}
    start = time.monotonic()
    try:
        polygon = generate(spec)
        state = Solver(polygon, SolveConfig.from_dict(config_values)).run()
    except Exception as e:
        logging.error(f"{spec.name} with config {config_name} failed: {e}")
        row["time_s"] = time.monotonic() - start
        row["error"] = str(e)
        return row, []
    row.update({"solved": state.reason == "optimal", "lb": state.lb, "ub": to_json_number(state.ub),
                "gap": state.gap, "time_s": time.monotonic() - start})
    return row, state.log.to_list()


def format_table(rows: Sequence[dict]) -> str:
    """Plain-text table of solved percentage and median gap per (class, size, config)."""
    groups: Dict[Tuple[str, int, str], List[float]] = {}
    for r in rows:
        groups.setdefault((r["class"], r["size"], r["config"]), []).append(r["gap"])
    lines = [f"{'class':<12}{'size':>6}  {'config':<10}{'solved':>8}{'gap':>9}"]
    for (cls, size, config), gaps in sorted(groups.items()):
        med = median_gap(gaps)
        gap_text = "inf" if math.isinf(med) else f"{100*med:.1f}%"
        lines.append(f"{cls:<12}{size:>6}  {config:<10}{100*solved_fraction(gaps):>7.0f}%{gap_text:>9}")
    return "\n".join(lines)


def run_batch(specs: Sequence[GenSpec], configs: Dict[str, dict], ncpu: int = 1, output_dir: Optional[str] = None,
              n_timestamps: int = 21) -> BatchResult:
    """
    Solve every instance with every config, in parallel over `ncpu` processes.

    Args:
        specs (list): The instances to generate
        configs (dict): Map of config name to SolveConfig values
        ncpu (int): Number of worker processes
        output_dir (str): If given, writes results.csv, series.json and table.txt there
        n_timestamps (int): Number of timestamps of the gap quartile series

    Returns:
        BatchResult: Rows (in job order), event logs, the series per config and the table
    """
    jobs = [(spec, name, dict(values)) for name, values in configs.items() for spec in specs]
    for _, name, values in jobs:
        SolveConfig.from_dict(values)

    result = BatchResult()
    disable = progress_disabled()
    if ncpu > 1:
        with Pool(ncpu) as pool:
            outputs = list(tqdm(pool.imap(solve_instance, jobs), total=len(jobs), disable=disable, desc="batch"))
    else:
        outputs = [solve_instance(job) for job in tqdm(jobs, disable=disable, desc="batch")]
    for row, events in outputs:
        result.rows.append(row)
        result.events.append(events)

    for name, values in configs.items():
        limit = SolveConfig.from_dict(values).time_limit_s
        timestamps = [float(t) for t in np.linspace(0, limit, n_timestamps)]
        runs = [ev for row, ev in zip(result.rows, result.events) if row["config"] == name]
        result.series[name] = QuartileSeries(name, timestamps, quartile_series(runs, timestamps, disable))
    result.table = format_table(result.rows)
    logging.info("Batch results\n" + result.table)

    if output_dir:
        write_batch(result, output_dir)
    return result


def write_batch(result: BatchResult, output_dir: str):
    if not os.path.exists(output_dir):
        os.makedirs(output_dir)
    with open(os.path.join(output_dir, "results.csv"), "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in result.rows:
            writer.writerow({**row, "gap": "inf" if math.isinf(row["gap"]) else row["gap"]})
    write_json({name: s.to_dict() for name, s in result.series.items()}, os.path.join(output_dir, "series.json"))
    with open(os.path.join(output_dir, "table.txt"), "w") as f:
        f.write(result.table + "\n")
