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
import logging
import itertools
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import networkx as nx

from artgallery.geometry import Point, visibility_polygon
from artgallery.arrangement import Cell, Weight, overlay
from artgallery.lp import FLOAT_TOLERANCE, Number
from artgallery.model import CutConstraint, VisibilityMatrix, make_ec_cut, make_sc_cut


CELL_ORDER = {"face": 0, "edge": 1, "vertex": 2}


@dataclass
class SeparationResult():
    """Points found by a separation call, with the extreme cell weight of the overlay."""
    found: bool
    points: List[Point] = field(default_factory=list)
    weight: Optional[Weight] = None
    n_cells: int = 0


def _is_exact(values: Iterable[Number]) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


def _pick_points(cells: List[Cell], max_points: int) -> List[Point]:
    # faces first, then edges, then vertices
    ordered = sorted(cells, key=lambda c: (CELL_ORDER[c.kind], c.point))
    return [c.point for c in ordered[:max_points]]


def primal_separate(matrix: VisibilityMatrix, x: Dict[int, Number], max_points: int = 100) -> SeparationResult:
    """
    Look for points of P that the fractional guard solution x covers with weight < 1.

    Overlays V(g) with weight x_g for every guard with x_g > 0, and returns representative
    points of the minimum-weight cells when that weight is below 1.

    Args:
        matrix (VisibilityMatrix): The current guards and witnesses
        x (dict): Map of guard id to its value
        max_points (int): Maximum number of points returned

    Returns:
        SeparationResult: `found` is False when x covers all of P
    """
    P = matrix.P
    exact = _is_exact(x.values())
    regions = [(visibility_polygon(matrix.guards[g], P).region, v) for g, v in sorted(x.items()) if v > 0]
    arr = overlay(regions, P)
    cells = arr.min_cells()
    lowest = cells[0].weight
    threshold = 1 if exact else 1 - FLOAT_TOLERANCE
    if lowest >= threshold:
        return SeparationResult(found=False, weight=lowest, n_cells=len(cells))
    points = [p for p in _pick_points(cells, max_points + len(matrix.witnesses)) if p not in matrix.witnesses]
    points = points[:max_points]
    logging.debug(f"Primal separation: {len(cells)} cells of weight {lowest}, returning {len(points)} witnesses")
    return SeparationResult(found=bool(points), points=points, weight=lowest, n_cells=len(cells))


def _cut_weight(cut: CutConstraint, seen: int) -> int:
    if cut.kind == "sc":
        return 2 if seen == len(cut.witnesses) else (1 if seen else 0)
    return 1 if seen else 0


def dual_separate(matrix: VisibilityMatrix, y: Dict[int, Number], cuts: Sequence[CutConstraint] = (),
                  z: Optional[Dict[int, Number]] = None, max_points: int = 100) -> SeparationResult:
    """
    Look for points of P that would be guards with negative reduced cost.

    Overlays V(w) weighted by the witness duals y_w. With cut duals z the weight of a cell also
    adds z_c times the coefficient a new guard in that cell would get in cut c, that is
    2 or 1 for SC cuts when the cell sees all or some of the cut's witnesses, and 1 for EC cuts
    when it sees any. Representative points of the maximum-weight cells are returned when that
    weight exceeds 1.

    Args:
        matrix (VisibilityMatrix): The current guards and witnesses
        y (dict): Map of witness id to its dual value
        cuts (list): The cut pool, in model order
        z (dict): Map of cut position to its dual value
        max_points (int): Maximum number of points returned

    Returns:
        SeparationResult: `found` is False when no point of P has dual weight above 1
    """
    P = matrix.P
    z = z or {}
    exact = _is_exact(list(y.values()) + list(z.values()))

    # one region per witness point involved, in a stable order
    region_points: List[Point] = [matrix.witnesses[w] for w, v in sorted(y.items()) if v > 0]
    active = [(k, c, v) for k, v in sorted(z.items()) if v > 0 for c in [cuts[k]]]
    for _, c, _ in active:
        for p in c.witnesses:
            if p not in region_points:
                region_points.append(p)
    label_of = {p: i for i, p in enumerate(region_points)}
    y_by_label: Dict[int, Number] = {}
    for w, v in y.items():
        if v > 0:
            y_by_label[label_of[matrix.witnesses[w]]] = v
    cut_labels = [(frozenset(label_of[p] for p in c.witnesses), c, v) for _, c, v in active]
    zero: Number = Fraction(0) if exact else 0.0

    def weight_fn(labels: FrozenSet[int]) -> Number:
        total = sum((y_by_label.get(i, zero) for i in labels), zero)
        for cut_set, c, v in cut_labels:
            total += v*_cut_weight(c, len(cut_set & labels))
        return total

    regions = [(visibility_polygon(p, P).region, Fraction(1)) for p in region_points]
    arr = overlay(regions, P)
    # points that are guards already cannot enter the model again
    candidates = [c for c in arr.cells(weight_fn) if c.point not in matrix.guards]
    if not candidates:
        return SeparationResult(found=False)
    highest = max(c.weight for c in candidates)
    cells = [c for c in candidates if c.weight == highest]
    threshold = 1 if exact else 1 + FLOAT_TOLERANCE
    if highest <= threshold:
        return SeparationResult(found=False, weight=highest, n_cells=len(cells))
    points = _pick_points(cells, max_points)
    logging.debug(f"Dual separation: {len(cells)} cells of weight {highest}, returning {len(points)} guards")
    return SeparationResult(found=True, points=points, weight=highest, n_cells=len(cells))


# Cut separation
def _coverage(matrix: VisibilityMatrix, x: Dict[int, Number], w: int) -> Number:
    vals = [x.get(g, 0) for g in matrix.seen_by(w)]
    return sum(vals, Fraction(0) if _is_exact(vals) else 0.0)


def _fractional(v: Number, exact: bool) -> bool:
    if exact:
        return 0 < v < 1
    return FLOAT_TOLERANCE < v < 1 - FLOAT_TOLERANCE


def _tight(v: Number, rhs: int, exact: bool) -> bool:
    return v == rhs if exact else abs(v - rhs) <= FLOAT_TOLERANCE  # type: ignore[operator]


def candidate_pool(matrix: VisibilityMatrix, x: Dict[int, Number]) -> List[int]:
    """Ids of the witnesses whose row is tight under x and seen by some fractional guard."""
    exact = _is_exact(x.values())
    frac = [g for g, v in sorted(x.items()) if _fractional(v, exact)]
    if not frac:
        return []
    touched = matrix.data[:, frac].any(axis=1)
    return [int(w) for w in np.flatnonzero(touched) if _tight(_coverage(matrix, x, int(w)), 1, exact)]


def _sc_lhs(matrix: VisibilityMatrix, x: Dict[int, Number], S: Sequence[int]) -> Number:
    counts = matrix.data[list(S)].sum(axis=0)
    vals = []
    for g in np.flatnonzero(counts):
        coef = 2 if counts[g] == len(S) else 1
        vals.append(coef*x.get(int(g), 0))
    return sum(vals, Fraction(0) if _is_exact(x.values()) else 0.0)


def separate_sc(matrix: VisibilityMatrix, x: Dict[int, Number], sizes: Sequence[int] = (3,),
                existing: Sequence[CutConstraint] = (), max_subsets: int = 10**6, max_cuts: int = 50,
                batch_size: int = 4096) -> List[CutConstraint]:
    """
    Find violated SC cuts 2*x(J2) + x(J1) >= 2 over witness subsets S of the candidate pool.

    Subsets are screened in floating point with numpy, and every candidate is confirmed with
    the exact values of x before it is returned.

    Args:
        matrix (VisibilityMatrix): The current guards and witnesses
        x (dict): Map of guard id to its value
        sizes (list): Subset sizes to enumerate, e.g. (3,) or (3, 4)
        existing (list): Cuts already in the model, skipped when found again
        max_subsets (int): Maximum number of subsets enumerated per call
        max_cuts (int): Maximum number of cuts returned, most violated first
        batch_size (int): Number of subsets screened per numpy batch

    Returns:
        list: New SC cuts
    """
    pool = candidate_pool(matrix, x)
    if len(pool) < min(sizes):
        return []
    exact = _is_exact(x.values())
    n_guards = len(matrix.guards)
    xf = np.array([float(x.get(g, 0)) for g in range(n_guards)])
    known: Set[Tuple[str, FrozenSet[Point]]] = {c.key for c in existing}

    subsets = itertools.chain.from_iterable(itertools.combinations(pool, s) for s in sizes)
    found: List[Tuple[Number, Tuple[int, ...]]] = []
    enumerated = 0
    while enumerated < max_subsets:
        batch = list(itertools.islice(subsets, min(batch_size, max_subsets - enumerated)))
        if not batch:
            break
        enumerated += len(batch)
        for size in sizes:
            group = [S for S in batch if len(S) == size]
            if not group:
                continue
            counts = matrix.data[np.array(group)].sum(axis=1)
            lhs = 2*((counts == size) @ xf) + ((counts > 0) & (counts < size)) @ xf
            for i in np.flatnonzero(lhs < 2 - FLOAT_TOLERANCE):
                S = group[int(i)]
                exact_lhs = _sc_lhs(matrix, x, S)
                if (exact_lhs < 2) if exact else (exact_lhs < 2 - FLOAT_TOLERANCE):
                    found.append((2 - exact_lhs, S))
    else:
        if next(subsets, None) is not None:
            logging.warning(f"SC separation stopped after {max_subsets} subsets of a pool of {len(pool)} witnesses")

    found.sort(key=lambda t: (-t[0], t[1]))
    cuts: List[CutConstraint] = []
    for _, S in found:
        cut = make_sc_cut([matrix.witnesses[w] for w in S])
        if cut.key in known:
            continue
        known.add(cut.key)
        cuts.append(cut)
        if len(cuts) >= max_cuts:
            break
    logging.debug(f"SC separation: pool of {len(pool)}, {enumerated} subsets, {len(cuts)} cuts")
    return cuts


def max_visible_witnesses(points: Sequence[Point], matrix: VisibilityMatrix) -> int:
    """Largest number of `points` seen from a single point of P, from the unit-weight overlay of their V(w)."""
    P = matrix.P
    arr = overlay([(visibility_polygon(p, P).region, Fraction(1)) for p in points], P)
    return int(arr.max_cells()[0].weight)


def separate_ec(matrix: VisibilityMatrix, x: Dict[int, Number], existing: Sequence[CutConstraint] = (),
                half_tolerance: float = 1e-6, max_cuts: int = 50) -> List[CutConstraint]:
    """
    Find violated EC cuts x(V(W)) >= ceil(|W|/2) for odd cycles W of witnesses.

    Guards at value 1/2 that see exactly two pool witnesses become edges of a graph on the
    candidate pool; odd cycles of its cycle basis are turned into cuts once the overlay of
    their visibility regions shows that no point of P sees more than two of them.

    Args:
        matrix (VisibilityMatrix): The current guards and witnesses
        x (dict): Map of guard id to its value
        existing (list): Cuts already in the model, skipped when found again
        half_tolerance (float): Tolerance for x_g = 1/2 with floating point values
        max_cuts (int): Maximum number of cuts returned

    Returns:
        list: New EC cuts
    """
    pool = candidate_pool(matrix, x)
    if len(pool) < 3:
        return []
    exact = _is_exact(x.values())
    in_pool = set(pool)
    half = [g for g, v in sorted(x.items())
            if (v == Fraction(1, 2) if exact else abs(v - 0.5) <= half_tolerance)]

    graph = nx.Graph()
    for g in half:
        seen = [w for w in matrix.seen_from(g) if w in in_pool]
        if len(seen) == 2:
            graph.add_edge(seen[0], seen[1], guard=g)
    if graph.number_of_edges() == 0:
        return []

    known = {c.key for c in existing}
    cuts: List[CutConstraint] = []
    for cycle in nx.cycle_basis(graph):
        k = len(cycle)
        if k < 3 or k % 2 == 0:
            continue
        guards = np.flatnonzero(matrix.data[cycle].any(axis=0))
        vals = [x.get(int(g), 0) for g in guards]
        lhs = sum(vals, Fraction(0) if exact else 0.0)
        rhs = math.ceil(k/2)
        if not ((lhs < rhs) if exact else (lhs < rhs - FLOAT_TOLERANCE)):
            continue
        points = [matrix.witnesses[w] for w in cycle]
        certificate = max_visible_witnesses(points, matrix)
        if certificate > 2:
            logging.debug(f"Odd cycle of {k} witnesses rejected, a point sees {certificate} of them")
            continue
        cut = make_ec_cut(points, certificate)
        if cut.key in known:
            continue
        known.add(cut.key)
        cuts.append(cut)
        if len(cuts) >= max_cuts:
            break
    logging.debug(f"EC separation: {graph.number_of_edges()} half-guard edges, {len(cuts)} cuts")
    return cuts


def separate_cuts(matrix: VisibilityMatrix, x: Dict[int, Number], kinds: Sequence[str],
                  existing: Sequence[CutConstraint] = (), max_subsets: int = 10**6, max_cuts: int = 50,
                  half_tolerance: float = 1e-6) -> List[CutConstraint]:
    """
    Run the cut separators named in `kinds` ("sc3", "sc4", "ec").

    Returns:
        list: New cuts, SC cuts first
    """
    cuts: List[CutConstraint] = []
    sizes: Tuple[int, ...] = ()
    if "sc4" in kinds:
        sizes = (3, 4)
    elif "sc3" in kinds:
        sizes = (3,)
    if sizes:
        cuts.extend(separate_sc(matrix, x, sizes, existing, max_subsets=max_subsets, max_cuts=max_cuts))
    if "ec" in kinds:
        cuts.extend(separate_ec(matrix, x, list(existing) + cuts, half_tolerance=half_tolerance, max_cuts=max_cuts))
    return cuts
