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
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.path import Path  # noqa: E402
from matplotlib.patches import Circle, PathPatch, Wedge  # noqa: E402

from artgallery.geometry import Point, Polygon, make_point, visibility_polygon  # noqa: E402


BOUNDARY_TOLERANCE = 1e-6


def _ring_path(rings: Sequence[Sequence[Point]]) -> Path:
    verts: List[Tuple[float, float]] = []
    codes: List[int] = []
    for ring in rings:
        pts = [(float(p.x), float(p.y)) for p in ring]
        verts.extend(pts + [pts[0]])
        codes.extend([Path.MOVETO] + [Path.LINETO]*(len(pts) - 1) + [Path.CLOSEPOLY])  # type: ignore[arg-type]
    return Path(verts, codes)


def render_solution(P: Polygon, guards: Iterable[Tuple[Point, float]], path: str, witnesses: Iterable[Point] = (),
                    shade: bool = False, title: Optional[str] = None):
    """
    Draw P with its holes, guards as circles filled in proportion to their value, and witnesses
    as small markers, and save the figure as SVG.

    Args:
        P (Polygon): The polygon
        guards (list): (point, value) pairs, values in [0, 1]
        path (str): Output file
        witnesses (list): Witness points
        shade (bool): Whether to shade V(g) of every guard with opacity proportional to its value
        title (str): Optional figure title
    """
    guards = [(p, float(v)) for p, v in guards]
    x0, y0, x1, y1 = (float(v) for v in P.bbox())
    radius = 0.015*max(x1 - x0, y1 - y0)

    fig, ax = plt.subplots(figsize=(6, 6))
    ax.add_patch(PathPatch(_ring_path(P.rings()), facecolor="#f4f1e8", edgecolor="black", linewidth=1.2))
    if shade:
        for p, v in guards:
            if v > 0:
                region = visibility_polygon(p, P).region
                ax.add_patch(PathPatch(_ring_path([region.outer]), facecolor="tab:orange", alpha=0.25*v, linewidth=0))
    for p, v in guards:
        c = (float(p.x), float(p.y))
        if v > 0:
            ax.add_patch(Wedge(c, radius, 90, 90 + 360*min(v, 1.0), facecolor="tab:blue", linewidth=0, zorder=3))
        ax.add_patch(Circle(c, radius, fill=False, edgecolor="tab:blue", linewidth=1.0, zorder=4))
    pts = [(float(w.x), float(w.y)) for w in witnesses]
    if pts:
        ax.scatter([x for x, _ in pts], [y for _, y in pts], marker="x", s=12, color="tab:red", zorder=5)

    margin = 2*radius
    ax.set_xlim(x0 - margin, x1 + margin)
    ax.set_ylim(y0 - margin, y1 + margin)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    _save(fig, path)


def render_record(record: dict, P: Polygon, path: str, shade: bool = False):
    """
    Draw the solution stored in a run record. Uses the final guard values when present,
    otherwise the guards of the best integral solution, and marks the witnesses of the run.

    Raises:
        ValueError: if a guard or witness of the record lies outside P
    """
    result = record.get("result", {})
    if result.get("values"):
        guards = [(make_point(*_rational(x, y)), v) for x, y, v in result["values"]]
    else:
        guards = [(make_point(*_rational(x, y)), 1.0) for x, y in result.get("guards", [])]
    witnesses = [make_point(*_rational(x, y)) for x, y in result.get("witnesses", [])]
    x0, y0, x1, y1 = (float(v) for v in P.bbox())
    tol = BOUNDARY_TOLERANCE*max(x1 - x0, y1 - y0)
    for p in [g for g, _ in guards] + witnesses:
        if not P.contains(p) and boundary_distance(p, P) > tol:
            raise ValueError(f"point {p} of the record lies outside the instance, record and instance do not match")
    render_solution(P, guards, path, witnesses=witnesses, shade=shade, title=record.get("instance"))


def boundary_distance(p: Point, P: Polygon) -> float:
    """Euclidean distance from p to the nearest edge of P, in floating point."""
    edges = np.array([[float(a.x), float(a.y), float(b.x), float(b.y)] for a, b in P.edges()])
    a, b = edges[:, :2], edges[:, 2:]
    q = np.array([float(p.x), float(p.y)])
    d = b - a
    t = np.clip(((q - a)*d).sum(axis=1)/(d*d).sum(axis=1), 0, 1)
    return float(np.min(np.linalg.norm(a + t[:, None]*d - q, axis=1)))


def _rational(x: float, y: float) -> Tuple[Fraction, Fraction]:
    return Fraction(x).limit_denominator(10**6), Fraction(y).limit_denominator(10**6)


def render_gap_plot(series: Dict[str, dict], path: str):
    """
    Plot the relative gap over time for each config: the median as a line and the Q1..Q3
    band shaded. Infinite gaps are drawn at the top of the axis.

    Args:
        series (dict): Map of config name to a series dict with "timestamps" and "quartiles"
                       (as written to series.json)
        path (str): Output file
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    finite = [v for s in series.values() for row in s["quartiles"] for v in row if v is not None and not math.isinf(v)]
    top = max(finite + [0.1])*1.1
    for name, s in series.items():
        t = np.asarray(s["timestamps"], dtype=float)
        q = np.array([[top if (v is None or math.isinf(v)) else v for v in row] for row in s["quartiles"]], dtype=float)
        q = q.reshape(len(t), 5)
        line, = ax.plot(t, 100*q[:, 2], label=name)
        ax.fill_between(t, 100*q[:, 1], 100*q[:, 3], color=line.get_color(), alpha=0.2)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("relative gap [%]")
    ax.set_ylim(0, 100*top)
    ax.legend()
    _save(fig, path)


def _save(fig, path: str):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logging.info(f"Saved figure to {path}")
