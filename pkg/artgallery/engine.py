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
import time
import logging
from fractions import Fraction
from dataclasses import dataclass, field, fields, asdict
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import artgallery
from artgallery.geometry import Point, Polygon
from artgallery.lp import LpModel, LpSolution, Number, solve_ip, solve_lp
from artgallery.model import CutConstraint, InfeasibleModelError, VisibilityMatrix, build_model
from artgallery.separation import dual_separate, primal_separate, separate_cuts
from artgallery.metrics import relative_gap
from artgallery.utils import banner, re_arg, to_json_number


@re_arg({"time_limit": "time_limit_s"})
def _config_values(**kwargs) -> dict:
    return kwargs


MODES = ("lp", "ip")
ARITHMETIC = ("exact", "float")
REASONS = ("optimal", "time_limit", "stalled")


@dataclass
class SolveConfig():
    """
    Settings for one solve.

    Attributes:
        mode (str): "lp" solves only LPs; "ip" solves the primal phase as an integer program
        cuts (str): Name of the cut separators to run, one of the keys of `artgallery.CUT_CONFIGS`
        time_limit_s (float): Wall-clock limit in seconds
        arithmetic (str): "exact" (rational simplex) or "float" (HiGHS through scipy)
        seed (int): Seed recorded with the run, used by generators in batch runs
        max_points_per_round (int): Maximum witnesses or guards added per separation call
        max_cuts_per_call (int): Maximum cuts added per separation call
        max_subsets (int): Maximum witness subsets enumerated per SC separation call
        half_tolerance (float): Tolerance for guards at 1/2 in EC separation (float arithmetic)
        cuts_on_feasible_only (bool): In the primal phase, separate cuts only once primal separation has failed
    """
    mode: str = "lp"
    cuts: str = "sc3+ec"
    time_limit_s: float = 600.0
    arithmetic: str = "exact"
    seed: int = 0
    max_points_per_round: int = 100
    max_cuts_per_call: int = 50
    max_subsets: int = 10**6
    half_tolerance: float = 1e-6
    cuts_on_feasible_only: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode '{self.mode}', expected one of {MODES}")
        if self.cuts not in artgallery.CUT_CONFIGS:
            raise ValueError(f"unknown cuts '{self.cuts}', expected one of {list(artgallery.CUT_CONFIGS)}")
        if self.arithmetic not in ARITHMETIC:
            raise ValueError(f"unknown arithmetic '{self.arithmetic}', expected one of {ARITHMETIC}")
        if self.time_limit_s < 0:
            raise ValueError("time_limit_s must be non-negative")
        for name in ("max_points_per_round", "max_cuts_per_call", "max_subsets"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    @property
    def cut_kinds(self) -> Tuple[str, ...]:
        return artgallery.CUT_CONFIGS[self.cuts]

    @classmethod
    def from_dict(cls, values: dict) -> "SolveConfig":
        """Build a config from a dict (e.g. loaded from YAML), rejecting unknown keys."""
        values = _config_values(**values)
        known = {f.name for f in fields(cls)}
        unknown = [k for k in values if k not in known]
        if unknown:
            raise ValueError(f"unknown config keys {unknown}, expected a subset of {sorted(known)}")
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveEvent():
    t: float
    lb: int
    ub: Union[int, float]
    n_guards: int
    n_witnesses: int
    n_cuts: int
    obj: Optional[Number]
    tag: str
    round_ub: Optional[int] = None

    def to_dict(self) -> dict:
        return {"t": self.t, "lb": self.lb, "ub": to_json_number(self.ub), "nG": self.n_guards,
                "nW": self.n_witnesses, "nCuts": self.n_cuts, "obj": to_json_number(self.obj),
                "tag": self.tag, "round_ub": self.round_ub}


@dataclass
class SolveLog():
    """Time-stamped bounds and sizes, one event per LP solve plus the initial and final ones."""
    events: List[SolveEvent] = field(default_factory=list)

    def append(self, event: SolveEvent):
        self.events.append(event)

    def to_list(self) -> List[dict]:
        return [e.to_dict() for e in self.events]

    def __len__(self) -> int:
        return len(self.events)


@dataclass
class SolveState():
    matrix: VisibilityMatrix
    cuts: List[CutConstraint] = field(default_factory=list)
    lb: int = 1
    ub: Union[int, float] = math.inf
    phase: str = "primal"
    clock: float = 0.0
    reason: Optional[str] = None
    best_guards: List[Point] = field(default_factory=list)
    values: Dict[Point, Number] = field(default_factory=dict)
    log: SolveLog = field(default_factory=SolveLog)

    @property
    def gap(self) -> float:
        return relative_gap(self.lb, self.ub)

    @property
    def optimal(self) -> bool:
        return self.lb >= self.ub

    def to_record(self, instance: str, config: SolveConfig) -> dict:
        """The run record, as written by `artgallery solve --json`."""
        return {
            "instance": instance,
            "config": config.to_dict(),
            "events": self.log.to_list(),
            "result": {
                "lb": self.lb,
                "ub": to_json_number(self.ub),
                "gap": to_json_number(self.gap),
                "reason": self.reason,
                "guards": [[float(p.x), float(p.y)] for p in self.best_guards],
                "witnesses": [[float(p.x), float(p.y)] for p in self.matrix.witnesses],
                "values": [[float(p.x), float(p.y), float(v)] for p, v in self.values.items() if v > 0]
            }
        }


def chvatal_bound(P: Polygon) -> int:
    """
    Number of point guards that always suffice: floor(n/3) for a polygon with n vertices
    and no holes, floor((n + h)/3) with h holes.
    """
    return (len(P.vertices()) + len(P.holes))//3


class Solver():
    """
    Iterative primal/dual solver for the minimum guard cover of a polygon.

    The primal phase solves the model on the current guards G and witnesses W, adds witnesses
    where the solution leaves part of P uncovered, and separates cuts, until nothing new is
    found. The dual phase does the same with guards taken from points where the dual solution
    is over-packed. The lower bound is raised from the dual objective when dual separation
    fails, the upper bound from integral solutions that cover all of P.
    """
    def __init__(self, P: Polygon, config: Optional[SolveConfig] = None, guards: Optional[Sequence[Point]] = None,
                 witnesses: Optional[Sequence[Point]] = None, initial_cuts: Sequence[CutConstraint] = (),
                 clock: Callable[[], float] = time.monotonic, **kwargs):
        """
        Set up the solver.

        Args:
            P (Polygon): The polygon to guard
            config (SolveConfig): Solver settings; keyword arguments override its fields
            guards (list): Initial guards, the vertices of P by default
            witnesses (list): Initial witnesses, the vertices of P by default
            initial_cuts (list): Initial cut pool, e.g. from a checkpoint
            clock (Callable): Time source in seconds
            kwargs (dict): Any SolveConfig field
        """
        base = config.to_dict() if config is not None else {}
        base.update(kwargs)
        self.config = SolveConfig.from_dict(base)
        self.P = P
        self._clock = clock
        matrix = VisibilityMatrix(P, guards if guards is not None else P.vertices(),
                                  witnesses if witnesses is not None else P.vertices())
        self.state = SolveState(matrix=matrix, cuts=list(initial_cuts))
        self._start = 0.0

    # Bookkeeping
    def _elapsed(self) -> float:
        return self._clock() - self._start

    def _timed_out(self) -> bool:
        return self._elapsed() >= self.config.time_limit_s

    def _done(self) -> bool:
        return self.state.optimal or self._timed_out()

    def _record(self, tag: str, obj: Optional[Number] = None, round_ub: Optional[int] = None):
        s = self.state
        s.clock = self._elapsed()
        s.log.append(SolveEvent(s.clock, s.lb, s.ub, len(s.matrix.guards), len(s.matrix.witnesses),
                                len(s.cuts), obj, tag, round_ub))

    def _update_ub(self, value: int, x: Dict[int, Number]):
        if value < self.state.ub:
            self.state.ub = value
            self.state.best_guards = [self.state.matrix.guards[g] for g, v in sorted(x.items()) if v > 0.5]
            logging.info(f"Upper bound {value} at {self._elapsed():.2f} s")

    def _update_lb(self, value: int):
        if value > self.state.lb:
            self.state.lb = value
            logging.info(f"Lower bound {value} at {self._elapsed():.2f} s")

    def _solve(self, integer: bool) -> Tuple[LpModel, LpSolution]:
        model = build_model(self.state.matrix, self.state.cuts)
        if integer:
            sol = solve_ip(model, arithmetic=self.config.arithmetic)
        else:
            sol = solve_lp(model, arithmetic=self.config.arithmetic)
        if not sol.optimal:
            raise InfeasibleModelError(f"the covering model with {len(model.columns)} guards and {len(model.rows)} rows "
                                       "is infeasible, some witness cannot be covered")
        return model, sol

    def _separate_cuts(self, x: Dict[int, Number]) -> List[CutConstraint]:
        kinds = self.config.cut_kinds
        if not kinds:
            return []
        new = separate_cuts(self.state.matrix, x, kinds, self.state.cuts, max_subsets=self.config.max_subsets,
                            max_cuts=self.config.max_cuts_per_call, half_tolerance=self.config.half_tolerance)
        self.state.cuts.extend(new)
        return new

    def _ceil(self, v: Number) -> int:
        if isinstance(v, Fraction):
            return math.ceil(v)
        return math.ceil(v - 1e-6)

    # Phases
    def _primal_phase(self):
        s = self.state
        while not self._done():
            _, sol = self._solve(integer=self.config.mode == "ip")
            x = dict(sol.primal)
            s.values = {s.matrix.guards[g]: v for g, v in x.items()}
            res = primal_separate(s.matrix, x, self.config.max_points_per_round)
            new_witnesses = s.matrix.add_witnesses(res.points) if res.found else []
            new_cuts: List[CutConstraint] = []
            if not (self.config.cuts_on_feasible_only and new_witnesses):
                new_cuts = self._separate_cuts(x)
            round_ub = None
            if not new_witnesses:
                round_ub = sum(1 for v in x.values() if v > 0)
                if sol.is_integral():
                    self._update_ub(int(round(sol.objective)), x)
            logging.debug(f"Primal phase: objective {sol.objective}, {len(new_witnesses)} witnesses "
                          f"and {len(new_cuts)} cuts added")
            self._record("primal", sol.objective, round_ub)
            if not new_witnesses and not new_cuts:
                return

    def _dual_phase(self):
        s = self.state
        while not self._done():
            model, sol = self._solve(integer=False)
            y = {r.id[1]: sol.dual[r.id] for r in model.rows if r.kind == "witness"}
            z = {r.id[1]: sol.dual[r.id] for r in model.rows if r.kind != "witness"}
            res = dual_separate(s.matrix, y, s.cuts, z, self.config.max_points_per_round)
            # x has entries for the current guards only, so cuts come before the new guards
            new_cuts = self._separate_cuts(dict(sol.primal))
            new_guards = s.matrix.add_guards(res.points) if res.found else []
            if not new_guards:
                self._update_lb(self._ceil(sol.dual_objective(model)))
            logging.debug(f"Dual phase: objective {sol.objective}, {len(new_guards)} guards "
                          f"and {len(new_cuts)} cuts added")
            self._record("dual", sol.objective)
            if not new_guards and not new_cuts:
                return

    def _signature(self) -> Tuple[int, int, int, int, Union[int, float]]:
        s = self.state
        return len(s.matrix.guards), len(s.matrix.witnesses), len(s.cuts), s.lb, s.ub

    def run(self) -> SolveState:
        """
        Alternate primal and dual phases until the bounds meet, the time limit is reached,
        or a full round changes nothing.

        Returns:
            SolveState: The final state, with its event log and termination reason
        """
        s = self.state
        self._start = self._clock()
        banner(f"Solving a polygon with {len(self.P.vertices())} vertices and {len(self.P.holes)} holes\n"
               f"mode={self.config.mode}, cuts={self.config.cuts}, arithmetic={self.config.arithmetic}")
        self._record("init")
        while not self._done():
            before = self._signature()
            s.phase = "primal"
            logging.info("Switching to the primal phase")
            self._primal_phase()
            if self._done():
                break
            s.phase = "dual"
            logging.info("Switching to the dual phase")
            self._dual_phase()
            if self._signature() == before:
                s.reason = "stalled"
                break

        if s.optimal:
            s.reason = "optimal"
        elif s.reason is None:
            s.reason = "time_limit"
        self._record(s.reason)
        logging.info(f"Finished ({s.reason}) with bounds [{s.lb}, {s.ub}] after {s.clock:.2f} s")
        return s


def run_lp_mode(P: Polygon, config: Optional[SolveConfig] = None, **kwargs) -> SolveState:
    """Solve with LP relaxations in both phases; keyword arguments override config fields."""
    kwargs["mode"] = "lp"
    return Solver(P, config, **kwargs).run()


def run_ip_mode(P: Polygon, config: Optional[SolveConfig] = None, **kwargs) -> SolveState:
    """Solve with integer programs in the primal phase; keyword arguments override config fields."""
    kwargs["mode"] = "ip"
    return Solver(P, config, **kwargs).run()
