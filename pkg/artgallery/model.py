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
import logging
from fractions import Fraction
from functools import lru_cache
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from artgallery.geometry import Point, Polygon, make_point, sees, visibility_polygon
from artgallery.arrangement import overlay
from artgallery.lp import LpModel


class InfeasibleModelError(ValueError):
    """Raised when a witness is seen by no guard, so no cover of W by G exists."""


# Define the guard and witness containers
class PointSet():
    """An ordered set of points with stable integer ids, deduplicated by exact coordinates."""
    def __init__(self, points: Iterable[Point] = ()):
        self.points: List[Point] = []
        self._index: Dict[Point, int] = {}
        for p in points:
            self.add(p)

    def add(self, p: Point) -> Tuple[int, bool]:
        """Add a point; returns its id and whether it was new."""
        if p in self._index:
            return self._index[p], False
        self._index[p] = len(self.points)
        self.points.append(p)
        return len(self.points) - 1, True

    def index(self, p: Point) -> int:
        return self._index[p]

    def __contains__(self, p: object) -> bool:
        return p in self._index

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, i: int) -> Point:
        return self.points[i]


class GuardSet(PointSet):
    pass


class WitnessSet(PointSet):
    pass


@lru_cache(maxsize=1 << 20)
def _cached_sees(a: Point, b: Point, P: Polygon) -> bool:
    return sees(a, b, P)


def cached_sees(a: Point, b: Point, P: Polygon) -> bool:
    """Memoized, symmetric wrapper around `geometry.sees`."""
    return _cached_sees(a, b, P) if a <= b else _cached_sees(b, a, P)


class VisibilityMatrix():
    """
    Boolean matrix with one row per witness and one column per guard; entry (w, g) tells
    whether g sees w. The matrix only grows, and computed entries never change.
    """
    def __init__(self, P: Polygon, guards: Iterable[Point] = (), witnesses: Iterable[Point] = ()):
        self.P = P
        self.guards = GuardSet()
        self.witnesses = WitnessSet()
        self.data: np.ndarray = np.zeros((0, 0), dtype=bool)
        self.add_guards(guards)
        self.add_witnesses(witnesses)

    def add_guards(self, points: Iterable[Point]) -> List[int]:
        """Add guards, returning the ids of those that were new."""
        new = []
        for p in points:
            gid, is_new = self.guards.add(p)
            if is_new:
                new.append(gid)
        if new:
            cols = np.array([[cached_sees(self.guards[g], w, self.P) for g in new] for w in self.witnesses],
                            dtype=bool).reshape(len(self.witnesses), len(new))
            self.data = np.hstack([self.data, cols])
        return new

    def add_witnesses(self, points: Iterable[Point]) -> List[int]:
        """Add witnesses, returning the ids of those that were new."""
        new = []
        for p in points:
            wid, is_new = self.witnesses.add(p)
            if is_new:
                new.append(wid)
        if new:
            rows = np.array([[cached_sees(g, self.witnesses[w], self.P) for g in self.guards] for w in new],
                            dtype=bool).reshape(len(new), len(self.guards))
            self.data = np.vstack([self.data, rows])
        return new

    def seen_by(self, w: int) -> List[int]:
        """Ids of the guards seeing witness w."""
        return [int(g) for g in np.flatnonzero(self.data[w])]

    def seen_from(self, g: int) -> List[int]:
        """Ids of the witnesses seen from guard g."""
        return [int(w) for w in np.flatnonzero(self.data[:, g])]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape


@dataclass(frozen=True)
class CutConstraint():
    """
    A persistent cut given by a witness set. For kind "sc" (|S| >= 3) the row reads
    2*x(J2) + x(J1) >= 2, where J2/J1 are the guards seeing all/some of S. For kind "ec"
    it reads x(V(W)) >= ceil(|W|/2) and is valid because no point sees more than two of W;
    `certificate` stores the maximum overlay weight found when that premise was checked.
    """
    kind: str
    witnesses: Tuple[Point, ...]
    rhs: int
    certificate: Optional[int] = None

    @property
    def key(self) -> Tuple[str, frozenset]:
        return self.kind, frozenset(self.witnesses)


def make_sc_cut(witnesses: Sequence[Point]) -> CutConstraint:
    if len(witnesses) < 3:
        raise ValueError("SC cuts need at least 3 witnesses")
    return CutConstraint("sc", tuple(witnesses), 2)


def make_ec_cut(witnesses: Sequence[Point], certificate: Optional[int] = None) -> CutConstraint:
    k = len(witnesses)
    if k < 3 or k % 2 == 0:
        raise ValueError("EC cuts need an odd number of at least 3 witnesses")
    return CutConstraint("ec", tuple(witnesses), (k + 1)//2, certificate)


def classify_guard(g: Point, S: Sequence[Point], P: Polygon) -> int:
    """2 if g sees all of S, 1 if it sees some of S, 0 if it sees none."""
    seen = sum(1 for s in S if cached_sees(g, s, P))
    if seen == len(S):
        return 2
    return 1 if seen else 0


def classify_by_overlay(g: Point, S: Sequence[Point], P: Polygon) -> int:
    """The same classification as `classify_guard`, read off the overlay of the V(s), s in S."""
    arr = overlay([(visibility_polygon(s, P).region, Fraction(1)) for s in S], P)
    n_seen = len(arr.locate(g).labels)
    if n_seen == len(S):
        return 2
    return 1 if n_seen else 0


def cut_coefficient(g: Point, c: CutConstraint, P: Polygon) -> int:
    """
    Coefficient of guard g in cut c: for SC cuts 2/1/0 when g sees all/some/none of S,
    for EC cuts 1 when g sees any witness of the cut.
    """
    level = classify_guard(g, c.witnesses, P)
    if c.kind == "sc":
        return level
    if c.kind == "ec":
        return 1 if level else 0
    raise ValueError(f"unknown cut kind '{c.kind}'")


def cut_row(matrix: VisibilityMatrix, c: CutConstraint) -> Dict[int, int]:
    """Coefficients of cut c for every guard of the matrix, using stored visibility where possible."""
    coeffs = {}
    rows = [matrix.witnesses.index(w) if w in matrix.witnesses else None for w in c.witnesses]
    for g, gp in enumerate(matrix.guards):
        seen = sum(1 for w, r in zip(c.witnesses, rows)
                   if (matrix.data[r, g] if r is not None else cached_sees(gp, w, matrix.P)))
        if c.kind == "sc":
            coef = 2 if seen == len(c.witnesses) else (1 if seen else 0)
        else:
            coef = 1 if seen else 0
        if coef:
            coeffs[g] = coef
    return coeffs


def build_model(matrix: VisibilityMatrix, cuts: Sequence[CutConstraint] = ()) -> LpModel:
    """
    Build the covering model for the guards G and witnesses W held by `matrix` and the cut pool.

    Columns are guard ids, witness rows have ids ("w", i) and cut rows ("sc", k) or ("ec", k)
    with k the position of the cut in `cuts`.

    Raises:
        InfeasibleModelError: if some witness is seen by no guard
    """
    m = LpModel()
    for g in range(len(matrix.guards)):
        m.add_column(g)
    for w in range(len(matrix.witnesses)):
        seen = matrix.seen_by(w)
        if not seen:
            raise InfeasibleModelError(f"witness {matrix.witnesses[w]} is not seen by any guard")
        m.add_row(("w", w), {g: 1 for g in seen}, 1, kind="witness")
    for k, c in enumerate(cuts):
        m.add_row((c.kind, k), cut_row(matrix, c), c.rhs, kind=c.kind)  # type: ignore[arg-type]
    return m


# Checkpoints
def _point_to_json(p: Point) -> List[str]:
    return [str(p.x), str(p.y)]


def _point_from_json(xy: Sequence) -> Point:
    return make_point(Fraction(str(xy[0])), Fraction(str(xy[1])))


def save_checkpoint(path: str, guards: Iterable[Point], witnesses: Iterable[Point], cuts: Sequence[CutConstraint] = ()):
    """Save (G, W, cuts) as JSON with exact rational coordinates written as strings."""
    data = {
        "guards": [_point_to_json(p) for p in guards],
        "witnesses": [_point_to_json(p) for p in witnesses],
        "cuts": [{"kind": c.kind, "witnesses": [_point_to_json(p) for p in c.witnesses], "rhs": c.rhs}
                 for c in cuts]
    }
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)


def load_checkpoint(path: str) -> Tuple[List[Point], List[Point], List[CutConstraint]]:
    """Load (G, W, cuts) saved by `save_checkpoint`."""
    with open(path, "r") as f:
        data = json.load(f)
    guards = [_point_from_json(p) for p in data.get("guards", [])]
    witnesses = [_point_from_json(p) for p in data.get("witnesses", [])]
    cuts = []
    for c in data.get("cuts", []):
        pts = tuple(_point_from_json(p) for p in c["witnesses"])
        if c["kind"] not in ("sc", "ec"):
            raise ValueError(f"unknown cut kind '{c['kind']}' in {path}")
        cuts.append(CutConstraint(c["kind"], pts, int(c["rhs"])))
    logging.info(f"Loaded checkpoint with {len(guards)} guards, {len(witnesses)} witnesses and {len(cuts)} cuts")
    return guards, witnesses, cuts
