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
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog


Number = Union[Fraction, float]

ROW_KINDS = ("witness", "sc", "ec")
FLOAT_TOLERANCE = 1e-9


class DuplicateIdError(ValueError):
    """Raised when a row or column id is added twice to a model."""


@dataclass
class Row():
    id: Hashable
    coeffs: Dict[Hashable, int]
    rhs: int
    kind: str = "witness"


class LpModel():
    """
    A covering program: minimize the sum of the [0, 1]-bounded column variables subject to
    rows `sum(coeffs[g]*x_g) >= rhs` with coefficients in {1, 2}.
    """
    def __init__(self):
        self.columns: List[Hashable] = []
        self.rows: List[Row] = []
        self._column_set: set = set()
        self._row_index: Dict[Hashable, int] = {}

    def add_column(self, col_id: Hashable, coeffs: Optional[Dict[Hashable, int]] = None) -> "LpModel":
        """
        Add a variable, optionally with its coefficients in existing rows.

        Args:
            col_id (Hashable): A fresh column id
            coeffs (dict): Map of row id to coefficient for rows that already exist

        Returns:
            LpModel: The model itself
        """
        if col_id in self._column_set:
            raise DuplicateIdError(f"column '{col_id}' already exists")
        self.columns.append(col_id)
        self._column_set.add(col_id)
        for row_id, coef in (coeffs or {}).items():
            if row_id not in self._row_index:
                raise ValueError(f"unknown row '{row_id}'")
            if coef:
                _check_coefficient(coef)
                self.rows[self._row_index[row_id]].coeffs[col_id] = coef
        return self

    def add_row(self, row_id: Hashable, coeffs: Dict[Hashable, int], rhs: int, kind: str = "witness") -> "LpModel":
        """
        Add a covering row `sum(coeffs[g]*x_g) >= rhs`.

        Args:
            row_id (Hashable): A fresh row id
            coeffs (dict): Map of column id to coefficient (1 or 2); zero entries are dropped
            rhs (int): The right-hand side
            kind (str): One of "witness", "sc" or "ec"

        Returns:
            LpModel: The model itself
        """
        if row_id in self._row_index:
            raise DuplicateIdError(f"row '{row_id}' already exists")
        if kind not in ROW_KINDS:
            raise ValueError(f"unknown row kind '{kind}', expected one of {ROW_KINDS}")
        clean = {}
        for col_id, coef in coeffs.items():
            if col_id not in self._column_set:
                raise ValueError(f"unknown column '{col_id}'")
            if coef:
                _check_coefficient(coef)
                clean[col_id] = coef
        self._row_index[row_id] = len(self.rows)
        self.rows.append(Row(row_id, clean, rhs, kind))
        return self

    def row(self, row_id: Hashable) -> Row:
        return self.rows[self._row_index[row_id]]

    def matrix(self) -> Tuple[List[List[int]], List[int]]:
        """Dense coefficient matrix (rows x columns) and right-hand sides."""
        index = {c: j for j, c in enumerate(self.columns)}
        A = [[0]*len(self.columns) for _ in self.rows]
        for i, r in enumerate(self.rows):
            for col_id, coef in r.coeffs.items():
                A[i][index[col_id]] = coef
        return A, [r.rhs for r in self.rows]


def _check_coefficient(coef: int):
    if coef not in (1, 2):
        raise ValueError(f"covering coefficients must be 1 or 2, got {coef}")


@dataclass
class LpSolution():
    status: str
    primal: Dict[Hashable, Number] = field(default_factory=dict)
    dual: Dict[Hashable, Number] = field(default_factory=dict)
    bound_dual: Dict[Hashable, Number] = field(default_factory=dict)
    objective: Optional[Number] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def is_integral(self, tol: float = 1e-6) -> bool:
        for v in self.primal.values():
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    return False
            elif abs(v - round(v)) > tol:
                return False
        return True

    def dual_objective(self, m: LpModel) -> Number:
        total: Number = Fraction(0)
        for r in m.rows:
            total += r.rhs*self.dual.get(r.id, 0)
        for v in self.bound_dual.values():
            total -= v
        return total


# Exact dual simplex on a dense tableau, upper bounds handled implicitly
def _dual_simplex_exact(A: List[List[int]], b: List[int]) -> Tuple[str, List[Fraction], List[Fraction], List[Fraction]]:
    m, n = len(A), len(A[0]) if A else 0
    width = n + m
    # rows of [-A | I] with the slacks as the starting basis
    T = [[Fraction(-A[i][j]) for j in range(n)] + [Fraction(1 if k == i else 0) for k in range(m)] for i in range(m)]
    d = [Fraction(1)]*n + [Fraction(0)]*m
    upper: List[Optional[Fraction]] = [Fraction(1)]*n + [None]*m
    basis = [n + i for i in range(m)]
    value = [Fraction(-bi) for bi in b]
    at_upper = [False]*width

    while True:
        # leaving row: smallest basic variable index among bound violations
        r, target = -1, Fraction(0)
        best_var = width
        for i in range(m):
            var = basis[i]
            if value[i] < 0 and var < best_var:
                r, target, best_var = i, Fraction(0), var
            else:
                u = upper[var]
                if u is not None and value[i] > u and var < best_var:
                    r, target, best_var = i, u, var
        if r < 0:
            break

        increase = value[r] < target
        row = T[r]
        basic = set(basis)
        enter, best_ratio = -1, None
        for j in range(width):
            if j in basic or row[j] == 0:
                continue
            can_use = (row[j] < 0) != at_upper[j] if increase else (row[j] > 0) != at_upper[j]
            if not can_use:
                continue
            ratio = abs(d[j]/row[j])
            if best_ratio is None or ratio < best_ratio:
                enter, best_ratio = j, ratio
        if enter < 0:
            return "infeasible", [], [], []

        # move the entering variable so that the leaving one lands on its bound
        delta = (value[r] - target)/row[enter]
        for i in range(m):
            if T[i][enter] != 0:
                value[i] -= T[i][enter]*delta
        entering_start = upper[enter] if at_upper[enter] else Fraction(0)
        assert entering_start is not None
        leaving = basis[r]
        at_upper[leaving] = upper[leaving] is not None and target == upper[leaving]
        at_upper[enter] = False
        basis[r] = enter
        value[r] = entering_start + delta

        piv = row[enter]
        T[r] = row = [v/piv for v in row]
        nonzero = [j for j in range(width) if row[j] != 0]
        for i in range(m):
            f = T[i][enter]
            if i != r and f != 0:
                Ti = T[i]
                for j in nonzero:
                    Ti[j] -= f*row[j]
        f = d[enter]
        if f != 0:
            for j in nonzero:
                d[j] -= f*row[j]

    x = [Fraction(1) if at_upper[j] else Fraction(0) for j in range(n)]
    for i, var in enumerate(basis):
        if var < n:
            x[var] = value[i]
    duals = [d[n + i] for i in range(m)]
    bound_duals = [-d[j] if at_upper[j] else Fraction(0) for j in range(n)]
    return "optimal", x, duals, bound_duals


def _simplex_float(A: List[List[int]], b: List[int]) -> Tuple[str, List[float], List[float], List[float]]:
    m, n = len(A), len(A[0]) if A else 0
    if m == 0:
        return "optimal", [0.0]*n, [], [0.0]*n
    res = linprog(c=np.ones(n), A_ub=-np.array(A, dtype=float), b_ub=-np.array(b, dtype=float),
                  bounds=[(0, 1)]*n, method="highs")
    if res.status == 2:
        return "infeasible", [], [], []
    if res.status != 0:
        raise RuntimeError(f"float LP backend failed: {res.message}")
    duals = [max(0.0, -float(v)) for v in res.ineqlin.marginals]
    bound_duals = [max(0.0, -float(v)) for v in res.upper.marginals]
    return "optimal", [float(v) for v in res.x], duals, bound_duals


def _solve_reduced(m: LpModel, fixed: Dict[Hashable, int], arithmetic: str) -> LpSolution:
    free = [c for c in m.columns if c not in fixed]
    index = {c: j for j, c in enumerate(free)}
    rows, A, b = [], [], []
    for r in m.rows:
        rhs = r.rhs - sum(coef for c, coef in r.coeffs.items() if fixed.get(c) == 1)
        if rhs <= 0:
            continue
        coeffs = [0]*len(free)
        for c, coef in r.coeffs.items():
            if c in index:
                coeffs[index[c]] = coef
        if sum(coeffs) < rhs:
            # even all free variables at 1 cannot satisfy the row
            return LpSolution(status="infeasible")
        rows.append(r.id)
        A.append(coeffs)
        b.append(rhs)

    result: Tuple[str, Sequence[Number], Sequence[Number], Sequence[Number]]
    if arithmetic == "exact":
        if A and free:
            result = _dual_simplex_exact(A, b)
        else:
            result = ("optimal", [Fraction(0)]*len(free), [], [Fraction(0)]*len(free))
        zero: Number = Fraction(0)
    elif arithmetic == "float":
        result = _simplex_float(A, b) if free else ("optimal", [], [], [])
        zero = 0.0
    else:
        raise ValueError(f"unknown arithmetic '{arithmetic}', expected 'exact' or 'float'")
    status, x, y, u = result
    if status != "optimal":
        return LpSolution(status=status)

    primal: Dict[Hashable, Number] = {}
    for c in m.columns:
        if c in fixed:
            primal[c] = Fraction(fixed[c]) if arithmetic == "exact" else float(fixed[c])
        else:
            primal[c] = x[index[c]]
    dual: Dict[Hashable, Number] = {r.id: zero for r in m.rows}
    dual.update(dict(zip(rows, y)))
    bound_dual: Dict[Hashable, Number] = {c: u[index[c]] for c in free}
    objective = sum(primal.values(), zero)
    return LpSolution(status="optimal", primal=primal, dual=dual, bound_dual=bound_dual, objective=objective)


def solve_lp(m: LpModel, arithmetic: str = "exact") -> LpSolution:
    """
    Solve the LP relaxation of a covering model.

    Args:
        m (LpModel): The model, with at least one column
        arithmetic (str): "exact" for the rational dual simplex with Bland's rule, or "float" for
                          the HiGHS backend in scipy (tolerance 1e-9)

    Returns:
        LpSolution: Optimal primal values, row duals (y) and upper-bound duals, or status "infeasible"
    """
    if not m.columns:
        raise ValueError("cannot solve a model without columns")
    sol = _solve_reduced(m, {}, arithmetic)
    logging.debug(f"LP with {len(m.columns)} columns and {len(m.rows)} rows: {sol.status}, objective {sol.objective}")
    return sol


def _most_fractional(sol: LpSolution, columns: List[Hashable]) -> Optional[Hashable]:
    best, best_dist = None, None
    for c in columns:
        v = sol.primal[c]
        frac = v - math.floor(v)
        if frac <= FLOAT_TOLERANCE or frac >= 1 - FLOAT_TOLERANCE:
            continue
        dist = abs(frac - Fraction(1, 2)) if isinstance(frac, Fraction) else abs(frac - 0.5)
        if best_dist is None or dist < best_dist:
            best, best_dist = c, dist
    return best


def solve_ip(m: LpModel, incumbent_limit: Optional[Number] = None, arithmetic: str = "exact") -> LpSolution:
    """
    Solve the binary covering program by depth-first branch-and-bound on LP relaxations.
    Branches on the most fractional variable (ties by column order), exploring x = 1 first.

    Args:
        m (LpModel): The model, with at least one column
        incumbent_limit (float): If given, only solutions with objective <= this value are searched for
        arithmetic (str): LP backend used at each node ("exact" or "float")

    Returns:
        LpSolution: An optimal binary solution, or status "infeasible"
    """
    if not m.columns:
        raise ValueError("cannot solve a model without columns")

    best: Optional[LpSolution] = None
    best_obj: Optional[int] = None
    limit = None if incumbent_limit is None else math.floor(incumbent_limit + FLOAT_TOLERANCE)
    stack: List[Dict[Hashable, int]] = [{}]
    nodes = 0
    while stack:
        fixed = stack.pop()
        nodes += 1
        sol = _solve_reduced(m, fixed, arithmetic)
        if not sol.optimal or sol.objective is None:
            continue
        bound = math.ceil(sol.objective - 1e-6)
        if best_obj is not None and bound >= best_obj:
            continue
        if limit is not None and bound > limit:
            continue
        j = _most_fractional(sol, m.columns)
        if j is None:
            primal: Dict[Hashable, Number] = {c: (Fraction(round(v)) if arithmetic == "exact" else float(round(v)))
                                              for c, v in sol.primal.items()}
            best_obj = int(sum(round(v) for v in primal.values()))
            best = LpSolution(status="optimal", primal=primal, objective=primal_sum(primal, arithmetic))
            continue
        stack.append({**fixed, j: 0})
        stack.append({**fixed, j: 1})

    logging.debug(f"Branch-and-bound explored {nodes} nodes, optimum {best_obj}")
    if best is None:
        return LpSolution(status="infeasible")
    return best


def primal_sum(primal: Dict[Hashable, Number], arithmetic: str = "exact") -> Number:
    return sum(primal.values(), Fraction(0) if arithmetic == "exact" else 0.0)


def write_lp_file(m: LpModel, path: str):
    """
    Write the model in the CPLEX LP text format (Minimize / Subject To / Bounds / End)
    for cross-checking with external solvers.
    """
    names = {c: f"x{j}" for j, c in enumerate(m.columns)}
    lines = ["\\ artgallery covering model", "Minimize", " obj: " + " + ".join(names[c] for c in m.columns),
             "Subject To"]
    for i, r in enumerate(m.rows):
        terms = " + ".join((f"{coef} {names[c]}" if coef != 1 else names[c]) for c, coef in r.coeffs.items())
        lines.append(f" {r.kind}{i}: {terms or '0 ' + names[m.columns[0]]} >= {r.rhs}")
    lines.append("Bounds")
    lines.extend(f" 0 <= {names[c]} <= 1" for c in m.columns)
    lines.append("End")

    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
