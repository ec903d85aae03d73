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
Facet checks for the polytope spanned by the binary covers of a visibility matrix.

All checks work on a boolean matrix `A` with one row per witness and one column per guard.
The brute-force oracle at the end enumerates every binary vector and is only meant for
small instances (about 16 guards at most).
"""

# Imports
import logging
import itertools
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import networkx as nx

from artgallery.geometry import Point, Polygon, visibility_polygon
from artgallery.arrangement import overlay
from artgallery.model import cached_sees


@dataclass
class FacetReport():
    """Outcome of a facet check: the verdict, each condition, and any failed precondition."""
    kind: str
    facet: bool
    conditions: Dict[str, bool] = field(default_factory=dict)
    precondition_issues: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "facet": self.facet, "conditions": dict(self.conditions),
                "precondition_issues": list(self.precondition_issues)}


@dataclass
class TrivialFacetReport():
    """Which of x_g >= 0, x_g <= 1 and the witness rows define facets."""
    lower: List[bool]
    upper: List[bool]
    witness_rows: List[bool]

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "witness_rows": self.witness_rows}


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=bool)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-d visibility matrix, got shape {A.shape}")
    return A


def is_full_dimensional(A) -> bool:
    """The cover polytope has full dimension exactly when every witness is seen by at least 2 guards."""
    A = _as_matrix(A)
    return bool((A.sum(axis=1) >= 2).all())


def guard_classes(A, S: Sequence[int]):
    """Boolean masks (J0, J1, J2) of the guards seeing none, some but not all, and all of the witnesses S."""
    A = _as_matrix(A)
    counts = A[list(S)].sum(axis=0)
    return counts == 0, (counts > 0) & (counts < len(S)), counts == len(S)


def two_cover_graph(A, S: Sequence[int]) -> nx.Graph:
    """Graph on the guards of J1 with an edge whenever two of them jointly see all of S."""
    A = _as_matrix(A)
    _, J1, _ = guard_classes(A, S)
    rows = A[list(S)]
    nodes = [int(g) for g in np.flatnonzero(J1)]
    graph = nx.Graph()
    graph.add_nodes_from(nodes)
    for g1, g2 in itertools.combinations(nodes, 2):
        if (rows[:, g1] | rows[:, g2]).all():
            graph.add_edge(g1, g2)
    return graph


def check_sc_facet(A, S: Sequence[int]) -> FacetReport:
    """
    Decide whether the SC inequality 2*x(J2) + x(J1) >= 2 of the witness set S defines a facet.

    The verdict is exact when the polytope is full-dimensional and S is maximal, i.e. no other
    witness is seen only by guards of J1 or J2. Violated preconditions are listed in
    `precondition_issues`; the conditions are still evaluated.

    Args:
        A (np.ndarray): Visibility matrix (witnesses x guards)
        S (list): Witness row indices, at least 2

    Returns:
        FacetReport: With conditions "odd_cycles" and "zero_guards"
    """
    A = _as_matrix(A)
    S = sorted(set(S))
    issues = []
    if not is_full_dimensional(A):
        issues.append("polytope is not full-dimensional")
    J0, J1, J2 = guard_classes(A, S)
    outside = [w for w in range(A.shape[0]) if w not in S]
    for w in outside:
        if not (A[w] & J0).any():
            issues.append(f"witness set is not maximal, witness {w} is only seen by guards seeing the set")
            break

    # every component of the 2-cover graph contains an odd cycle
    graph = two_cover_graph(A, S)
    odd_cycles = all(not nx.is_bipartite(graph.subgraph(c)) for c in nx.connected_components(graph))

    zero_guards = True
    rows_S = A[S]
    j0 = np.flatnonzero(J0)
    j1 = [int(g) for g in np.flatnonzero(J1)]
    j2 = np.flatnonzero(J2)
    for g in j0:
        others = np.array([h for h in j0 if h != g], dtype=int)
        seen_by_others = A[:, others].any(axis=1) if len(others) else np.zeros(A.shape[0], dtype=bool)
        T = np.flatnonzero(A[:, g] & ~seen_by_others)
        if len(T) == 0:
            continue
        if any(A[T, h].all() for h in j2):
            continue
        pair_found = False
        for a, b in itertools.combinations(j1, 2):
            if (A[T, a] | A[T, b]).all() and (rows_S[:, a] | rows_S[:, b]).all():
                pair_found = True
                break
        if not pair_found:
            zero_guards = False
            break

    conditions = {"odd_cycles": bool(odd_cycles), "zero_guards": bool(zero_guards)}
    return FacetReport("sc", all(conditions.values()), conditions, issues)


def check_ec_facet(A, cycle: Sequence[int]) -> FacetReport:
    """
    Sufficient conditions for the EC inequality x(V(W)) >= ceil(k/2) of an odd cycle of
    witnesses W = cycle (in cyclic order) to define a facet. A False verdict does not
    prove that the inequality is not a facet.

    Args:
        A (np.ndarray): Visibility matrix (witnesses x guards)
        cycle (list): Witness row indices in cycle order, odd length >= 3

    Returns:
        FacetReport: With conditions "at_most_two", "consecutive_pairs", "pair_guards_only_pairs"
                     and "closed_neighbourhood"
    """
    A = _as_matrix(A)
    cycle = list(cycle)
    k = len(cycle)
    issues = []
    if k < 3 or k % 2 == 0:
        issues.append(f"cycle length {k} is not odd and at least 3")
    if not is_full_dimensional(A):
        issues.append("polytope is not full-dimensional")

    rows = A[cycle]
    counts = rows.sum(axis=0)
    in_cycle = set(cycle)

    # no guard sees more than two witnesses of the cycle
    at_most_two = bool((counts <= 2).all())
    # every pair of consecutive witnesses is seen by a common guard
    consecutive = all((rows[i] & rows[(i + 1) % k]).any() for i in range(k))
    # guards seeing two witnesses of the cycle see consecutive ones
    pair_ok = True
    for g in np.flatnonzero(counts == 2):
        i, j = np.flatnonzero(rows[:, g])
        if (j - i) % k not in (1, k - 1):
            pair_ok = False
    # guards seeing any witness of the cycle see no witness outside it
    closed = True
    for g in np.flatnonzero(counts > 0):
        if any(w not in in_cycle for w in np.flatnonzero(A[:, g])):
            closed = False

    conditions = {"at_most_two": at_most_two, "consecutive_pairs": bool(consecutive),
                  "pair_guards_only_pairs": pair_ok, "closed_neighbourhood": closed}
    return FacetReport("ec", not issues and all(conditions.values()), conditions, issues)


def lower_bound_is_facet(A, g: int) -> bool:
    """x_g >= 0 defines a facet iff every witness is seen by at least 2 guards other than g."""
    A = _as_matrix(A)
    others = np.delete(A, g, axis=1)
    return bool((others.sum(axis=1) >= 2).all())


def witness_row_is_facet(A, w: int) -> bool:
    """
    Decide whether the row x(V(w)) >= 1 defines a facet of a full-dimensional cover polytope.

    Holds iff no witness is seen by a strict subset of the guards seeing w, and for every
    guard g not seeing w some guard seeing w sees all the witnesses seen by g that no guard
    outside V(w) + {g} sees.
    """
    A = _as_matrix(A)
    Nw = A[w]
    for v in range(A.shape[0]):
        Nv = A[v]
        if (Nv <= Nw).all() and Nv.sum() < Nw.sum():
            return False
    inside = np.flatnonzero(Nw)
    for g in np.flatnonzero(~Nw):
        allowed = Nw.copy()
        allowed[g] = True
        M = np.flatnonzero(A[:, g] & ~(A & ~allowed).any(axis=1))
        if len(M) == 0:
            continue
        if not any(A[M, h].all() for h in inside):
            return False
    return True


def check_trivial_facets(A) -> TrivialFacetReport:
    """
    Check every bound inequality and witness row. Upper bounds x_g <= 1 and witness rows are
    only classified on full-dimensional polytopes and reported False otherwise.
    """
    A = _as_matrix(A)
    full = is_full_dimensional(A)
    n_w, n_g = A.shape
    lower = [lower_bound_is_facet(A, g) for g in range(n_g)]
    upper = [full]*n_g
    rows = [full and witness_row_is_facet(A, w) for w in range(n_w)]
    return TrivialFacetReport(lower, upper, rows)


# Full circulant polygons
def circulant_matrix(guards: Sequence[Point], witnesses: Sequence[Point], P: Polygon) -> np.ndarray:
    return np.array([[cached_sees(g, w, P) for g in guards] for w in witnesses], dtype=bool)


def is_full_circulant(P: Polygon, guards: Sequence[Point], witnesses: Sequence[Point]) -> bool:
    """
    Check that guard i sees every witness except witness i, and that every point of P
    is seen by at least k - 1 of the k guards (from the unit-weight overlay of their V(g)).
    """
    k = len(guards)
    if k < 3 or len(witnesses) != k:
        return False
    A = circulant_matrix(guards, witnesses, P)
    if not (A == ~np.eye(k, dtype=bool)).all():
        return False
    arr = overlay([(visibility_polygon(g, P).region, Fraction(1)) for g in guards], P)
    lowest = arr.min_cells()[0].weight
    logging.debug(f"Full circulant check: minimum coverage {lowest} for {k} guards")
    return lowest >= k - 1


def pairs_cover_polygon(P: Polygon, guards: Sequence[Point]) -> bool:
    """True if every pair of the given guards jointly sees all of P."""
    for a, b in itertools.combinations(guards, 2):
        arr = overlay([(visibility_polygon(a, P).region, Fraction(1)),
                       (visibility_polygon(b, P).region, Fraction(1))], P)
        if arr.min_cells()[0].weight < 1:
            return False
    return True


# Brute-force oracle
def feasible_points(A) -> np.ndarray:
    """All binary vectors x with A x >= 1, one per row."""
    A = _as_matrix(A)
    n = A.shape[1]
    if n > 20:
        raise ValueError(f"brute-force enumeration is limited to 20 guards, got {n}")
    X = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.int64)
    covered = (X @ A.T.astype(np.int64)) >= 1
    return X[covered.all(axis=1)]


def exact_rank(rows) -> int:
    """Rank of an integer matrix computed with exact rational elimination."""
    M = [[Fraction(int(v)) for v in r] for r in rows]
    if not M:
        return 0
    rank, n_cols = 0, len(M[0])
    for col in range(n_cols):
        pivot = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col]/M[rank][col]
                M[i] = [a - f*b for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == len(M):
            break
    return rank


def affine_dimension(points: np.ndarray) -> int:
    """Dimension of the affine hull of a set of points, -1 when empty."""
    if len(points) == 0:
        return -1
    return exact_rank(points[1:] - points[0])


def face_dimension(A, coeffs: Sequence[int], rhs: int) -> Optional[int]:
    """
    Dimension of the face {coeffs . x = rhs} of the cover polytope, or None when the
    inequality coeffs . x >= rhs is not valid for it.
    """
    X = feasible_points(A)
    lhs = X @ np.asarray(coeffs, dtype=np.int64)
    if (lhs < rhs).any():
        return None
    return affine_dimension(X[lhs == rhs])


def facet_by_oracle(A, coeffs: Sequence[int], rhs: int) -> bool:
    """True if coeffs . x >= rhs is valid and its face has dimension one less than the polytope."""
    dim = face_dimension(A, coeffs, rhs)
    if dim is None:
        return False
    return dim == affine_dimension(feasible_points(A)) - 1


def sc_coefficients(A, S: Sequence[int]) -> List[int]:
    _, J1, J2 = guard_classes(A, S)
    return [int(v) for v in (2*J2 + J1)]


def ec_coefficients(A, cycle: Sequence[int]) -> List[int]:
    A = _as_matrix(A)
    return [int(v) for v in A[list(cycle)].any(axis=0)]


def brute_force_cover(A) -> Optional[List[int]]:
    """A minimum cover of all witnesses by guards (as column indices), or None if none exists."""
    X = feasible_points(A)
    if len(X) == 0:
        return None
    best = X[int(np.argmin(X.sum(axis=1)))]
    return [int(g) for g in np.flatnonzero(best)]
