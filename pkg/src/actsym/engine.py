"""Branch-and-bound over binary variables with a pluggable propagation loop.

Symmetry handling enters through *handlers*: objects with an
``activations(node, program)`` method returning :class:`Activation` records.
Each activation names a submatrix whose columns may be assumed
lexicographically non-increasing below the node; the engine enforces that by
orbitopal fixing. Global orbitopes are handlers that always return their
whole matrix (:class:`StaticOrbitope`).

A handler's correctness obligation: every feasible completion of the node's
fixings must lie in a solution subset that is sub-symmetric with respect to
the returned rows and columns. The engine trusts this unless
``SolverConfig.verify_activations`` is set, which checks every activation
against the brute-force oracle (tiny programs only).
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from . import lp as lpmod
from .model import (MAXIMIZE, MixedBinaryProgram, ORBITOPE_KINDS, Submatrix, VarMatrix,
                    evaluate)
from .orbitope import propagate_orbitope

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIME_LIMIT = "time_limit"
NODE_LIMIT = "node_limit"

BEST_FIRST = "best-first"
DEPTH_FIRST = "depth-first"


@dataclass(frozen=True)
class Activation:
    target: Submatrix
    kind: str

    def __post_init__(self):
        rows, cols = self.target.shape
        if rows < 1:
            raise ValueError("activation needs a nonempty row set")
        if cols < 2:
            raise ValueError("activation needs at least two columns")
        if self.kind not in ORBITOPE_KINDS:
            raise ValueError(f"unknown orbitope kind {self.kind!r}")

    @property
    def key(self):
        return (self.target.matrix.label, self.target.row_set, self.target.col_list, self.kind)


@dataclass
class NodeState:
    id: int
    depth: int = 0
    fixed_zero: set = field(default_factory=set)
    fixed_one: set = field(default_factory=set)
    bound_overrides: dict = field(default_factory=dict)
    parent: int | None = None
    lp_bound: float | None = None

    def value(self, vid: str):
        """0, 1 or None (unfixed)."""
        if vid in self.fixed_one:
            return 1
        if vid in self.fixed_zero:
            return 0
        return None

    def is_fixed(self, vid: str) -> bool:
        return vid in self.fixed_zero or vid in self.fixed_one

    def child(self, new_id: int, vid: str, value: int) -> "NodeState":
        zero, one = set(self.fixed_zero), set(self.fixed_one)
        (one if value else zero).add(vid)
        return NodeState(new_id, self.depth + 1, zero, one, dict(self.bound_overrides),
                         self.id, self.lp_bound)


class ActivationHandler(Protocol):
    def activations(self, node: NodeState, program: MixedBinaryProgram) -> list[Activation]:
        ...


class StaticOrbitope:
    """Global symmetry: the whole matrix is always active."""

    def __init__(self, matrix: VarMatrix, kind: str | None = None):
        self.matrix = matrix
        self.activation = Activation(matrix.submatrix(), kind or matrix.kind)

    def activations(self, node, program):
        return [self.activation]

    def __repr__(self):
        return f"StaticOrbitope({self.matrix.label!r}, {self.activation.kind})"


@dataclass
class SolverConfig:
    setting: str = "no-sym"
    time_limit_s: float = 3600.0
    node_limit: int | None = None
    eps_feas: float = 1e-7
    eps_opt: float = 1e-7
    eps_int: float = 1e-6
    node_selection: str = BEST_FIRST
    max_propagation_rounds: int = 50
    bound_propagation: bool = True
    degenerate_limit: int = 100
    lp_iteration_limit: int = 50_000
    objective_integral: bool | None = None  # None: detect from the program
    verify_activations: bool = False
    random_seed: int = 0

    def simplex_options(self) -> lpmod.SimplexOptions:
        return lpmod.SimplexOptions(eps_feas=self.eps_feas, eps_opt=self.eps_opt,
                                    degenerate_limit=self.degenerate_limit,
                                    max_iterations=self.lp_iteration_limit)


@dataclass
class SolveReport:
    status: str
    objective: Fraction | None
    incumbent: dict | None
    nodes: int
    time_s: float
    setting: str = ""
    instance: str = ""
    lp_iterations: int = 0
    activations: int = 0
    fixings: int = 0


@dataclass
class PropagationResult:
    fixings: dict
    infeasible: bool
    rounds: int


class BranchAndBound:
    """One search over ``program``; create a fresh instance per solve."""

    def __init__(self, program: MixedBinaryProgram, config: SolverConfig | None = None,
                 handlers: Sequence[ActivationHandler] = (),
                 on_activation: Callable | None = None):
        self.program = program
        self.config = config or SolverConfig()
        self.handlers = list(handlers)
        self.on_activation = on_activation
        self.relax = lpmod.LpRelaxation(program, self.config.simplex_options())
        self._exact_relax = None
        idx = program.index
        self.ids = [v.id for v in program.variables]
        self.binary_pos = [i for i, v in enumerate(program.variables) if v.is_binary]
        self.has_continuous = len(self.binary_pos) < len(self.ids)
        A = self.relax.A
        self._Apos = np.maximum(A, 0.0)
        self._Aneg = np.minimum(A, 0.0)
        self._row_lo = np.array([-math.inf if x is None else x for x in self.relax.row_lo])
        self._row_hi = np.array([math.inf if x is None else x for x in self.relax.row_hi])
        self._is_binary = np.zeros(len(self.ids), dtype=bool)
        self._is_binary[self.binary_pos] = True
        self._idx = idx
        cfg = self.config
        if cfg.objective_integral is None:
            self.objective_integral = all(
                (v.objective.denominator == 1) if v.is_binary else v.objective == 0
                for v in program.variables)
        else:
            self.objective_integral = cfg.objective_integral
        self.maximize = program.sense == MAXIMIZE
        self.activation_count = 0
        self.fixing_count = 0
        self.lp_iterations = 0
        self._verify = None
        if cfg.verify_activations:
            from .oracle import ActivationVerifier
            self._verify = ActivationVerifier(program)

    # -- bounds ---------------------------------------------------------------

    def node_bounds(self, node: NodeState):
        lower = self.relax.lower.copy()
        upper = self.relax.upper.copy()
        idx = self._idx
        for vid in node.fixed_zero:
            upper[idx[vid]] = 0.0
        for vid in node.fixed_one:
            lower[idx[vid]] = 1.0
        for vid, (lo, hi) in node.bound_overrides.items():
            lower[idx[vid]] = max(lower[idx[vid]], float(lo))
            upper[idx[vid]] = min(upper[idx[vid]], float(hi))
        return lower, upper

    # -- propagation --------------------------------------------------------------

    def _bound_propagation(self, node: NodeState, added: dict) -> bool:
        """Activity-based fixing of binaries; returns False on infeasibility."""
        if not len(self._row_lo):
            return True
        eps = self.config.eps_feas
        while True:
            lower, upper = self.node_bounds(node)
            min_act = self._Apos.dot(lower) + self._Aneg.dot(upper)
            max_act = self._Apos.dot(upper) + self._Aneg.dot(lower)
            if np.any(min_act > self._row_hi + eps) or np.any(max_act < self._row_lo - eps):
                return False
            free = self._is_binary & (lower < upper)
            if not free.any():
                return True
            slack_hi = (self._row_hi - min_act)[:, None]
            slack_lo = (max_act - self._row_lo)[:, None]
            Ap = self._Apos[:, free]
            An = -self._Aneg[:, free]
            to_zero = ((Ap > slack_hi + eps) | (An > slack_lo + eps)).any(axis=0)
            to_one = ((An > slack_hi + eps) | (Ap > slack_lo + eps)).any(axis=0)
            if np.any(to_zero & to_one):
                return False
            if not (to_zero.any() or to_one.any()):
                return True
            free_pos = np.flatnonzero(free)
            for j in free_pos[to_zero]:
                vid = self.ids[j]
                node.fixed_zero.add(vid)
                added[vid] = 0
            for j in free_pos[to_one]:
                vid = self.ids[j]
                node.fixed_one.add(vid)
                added[vid] = 1

    def _apply_activation(self, node: NodeState, act: Activation, added: dict) -> bool:
        sub = act.target
        grid = [[node.value(v) for v in row] for row in sub.grid()]
        delta = propagate_orbitope(grid, act.kind)
        if delta.infeasible:
            return False
        for r, c, v in delta.fixings:
            vid = sub.entry(r, c)
            (node.fixed_one if v else node.fixed_zero).add(vid)
            added[vid] = v
        return True

    def propagate(self, node: NodeState) -> PropagationResult:
        """Run bound propagation and all handlers to a fixpoint (or the round cap)."""
        added: dict = {}
        rounds = 0
        cfg = self.config
        while rounds < cfg.max_propagation_rounds:
            rounds += 1
            before = len(added)
            if cfg.bound_propagation and not self._bound_propagation(node, added):
                return PropagationResult(added, True, rounds)
            for handler in self.handlers:
                for act in handler.activations(node, self.program):
                    self.activation_count += 1
                    if self.on_activation is not None:
                        self.on_activation(node, act, frozenset(node.fixed_zero),
                                           frozenset(node.fixed_one))
                    if self._verify is not None:
                        self._verify.check(node, act)
                    if not self._apply_activation(node, act, added):
                        return PropagationResult(added, True, rounds)
            if len(added) == before:
                break
        self.fixing_count += len(added)
        return PropagationResult(added, False, rounds)

    # -- incumbents -----------------------------------------------------------------

    def _exact_completion(self, node: NodeState, binary_values: dict):
        """Exact assignment for fixed binaries, or None if no feasible completion."""
        assignment = {vid: Fraction(val) for vid, val in binary_values.items()}
        if self.has_continuous:
            if self._exact_relax is None:
                self._exact_relax = lpmod.LpRelaxation(self.program, exact=True)
            rel = self._exact_relax
            lower, upper = rel.lower.copy(), rel.upper.copy()
            idx = self._idx
            for vid, val in binary_values.items():
                lower[idx[vid]] = upper[idx[vid]] = Fraction(val)
            for vid, (lo, hi) in node.bound_overrides.items():
                j = idx[vid]
                lower[j] = max(lower[j], Fraction(lo))
                upper[j] = min(upper[j], Fraction(hi))
            res = rel.solve(lower, upper)
            if res.status != lpmod.OPTIMAL:
                return None
            for vid in self.program.continuous_ids:
                assignment[vid] = res.values[vid]
        ev = evaluate(self.program, assignment)
        if not ev.feasible:
            return None
        return assignment, ev.objective

    # -- pruning ----------------------------------------------------------------------

    def can_improve(self, bound, incumbent_obj) -> bool:
        if incumbent_obj is None or bound is None:
            return True
        inc = float(incumbent_obj)
        tol = max(self.config.eps_opt, 1e-9 * abs(inc)) + 1e-9
        if self.maximize:
            if self.objective_integral:
                return math.floor(bound + 1e-6) > inc
            return bound > inc + tol
        if self.objective_integral:
            return math.ceil(bound - 1e-6) < inc
        return bound < inc - tol

    # -- main loop ----------------------------------------------------------------------

    def solve(self) -> SolveReport:
        cfg = self.config
        start = time.perf_counter()
        counter = itertools.count()
        ids = itertools.count(1)
        root = NodeState(0)
        queue: list = []
        sign = -1 if self.maximize else 1

        def push(node):
            if cfg.node_selection == DEPTH_FIRST:
                heapq.heappush(queue, (0.0, -next(counter), node))
            else:
                key = sign * node.lp_bound if node.lp_bound is not None else -math.inf
                heapq.heappush(queue, (key, next(counter), node))

        push(root)
        incumbent = None
        inc_obj = None
        nodes = 0
        status = None
        while queue:
            if time.perf_counter() - start > cfg.time_limit_s:
                status = TIME_LIMIT
                break
            if cfg.node_limit is not None and nodes >= cfg.node_limit:
                status = NODE_LIMIT
                break
            _, _, node = heapq.heappop(queue)
            if not self.can_improve(node.lp_bound, inc_obj):
                continue
            nodes += 1
            prop = self.propagate(node)
            if prop.infeasible:
                continue
            lower, upper = self.node_bounds(node)
            try:
                res = self.relax.solve(lower, upper)
            except lpmod.IterationLimit:
                log.warning("LP iteration limit at node %d; branching without a bound", node.id)
                res = None
            if res is not None:
                self.lp_iterations += res.iterations
                if res.status == lpmod.INFEASIBLE:
                    continue
                if res.status == lpmod.UNBOUNDED:
                    raise RuntimeError("LP relaxation unbounded; binaries and continuous "
                                       "variables must have finite bounds")
                node.lp_bound = float(res.objective)
                if not self.can_improve(node.lp_bound, inc_obj):
                    continue
                frac = self._fractional(res)
                if not frac:
                    vals = {self.ids[j]: int(round(res.values[self.ids[j]])) for j in self.binary_pos}
                    found = self._exact_completion(node, vals)
                    if found is not None:
                        assignment, obj = found
                        if inc_obj is None or self.program.better(obj, inc_obj):
                            incumbent, inc_obj = assignment, obj
                        continue
                    var = self._first_unfixed(node)
                    if var is None:
                        continue
                else:
                    var = frac[0]
            else:
                var = self._first_unfixed(node)
                if var is None:
                    continue
            c0 = node.child(next(ids), var, 0)
            c1 = node.child(next(ids), var, 1)
            first, second = (c1, c0) if self.maximize else (c0, c1)
            if cfg.node_selection == DEPTH_FIRST:
                push(second)
                push(first)
            else:
                push(first)
                push(second)
        if status is None:
            status = OPTIMAL if incumbent is not None else INFEASIBLE
        elapsed = time.perf_counter() - start
        return SolveReport(status, inc_obj, incumbent, nodes, elapsed, cfg.setting,
                           self.program.name, self.lp_iterations, self.activation_count,
                           self.fixing_count)

    def _fractional(self, res: lpmod.LpResult) -> list[str]:
        """Fractional binaries ordered by branching preference."""
        eps = self.config.eps_int
        scored = []
        for j in self.binary_pos:
            v = res.values[self.ids[j]]
            f = v - math.floor(v)
            if eps < f < 1 - eps:
                scored.append((round(abs(v - 0.5), 9), j))
        scored.sort()
        return [self.ids[j] for _, j in scored]

    def _first_unfixed(self, node: NodeState) -> str | None:
        for j in self.binary_pos:
            vid = self.ids[j]
            if not node.is_fixed(vid):
                return vid
        return None

    # -- exhaustive mode ------------------------------------------------------------

    def enumerate_survivors(self, lp_prune: bool = True) -> list[dict]:
        """All feasible points not excluded by propagation, by full DFS branching.

        There is no objective pruning, so only tiny programs are sensible here.
        With ``lp_prune`` a node is dropped once its LP relaxation is infeasible.
        """
        survivors = []
        stack = [NodeState(0)]
        ids = itertools.count(1)
        while stack:
            node = stack.pop()
            if self.propagate(node).infeasible:
                continue
            if lp_prune and self.relax.solve(*self.node_bounds(node)).status == lpmod.INFEASIBLE:
                continue
            var = self._first_unfixed(node)
            if var is None:
                vals = {vid: (1 if vid in node.fixed_one else 0)
                        for vid in (self.ids[j] for j in self.binary_pos)}
                found = self._exact_completion(node, vals)
                if found is not None:
                    survivors.append(found[0])
                continue
            stack.append(node.child(next(ids), var, 0))
            stack.append(node.child(next(ids), var, 1))
        return survivors


def branch(node: NodeState, lp_result: lpmod.LpResult, program: MixedBinaryProgram,
           eps_int: float = 1e-6, next_id: int | None = None) -> tuple[NodeState, NodeState]:
    """Most-fractional branching; ties go to the smallest variable index."""
    best = None
    for j, v in enumerate(program.variables):
        if not v.is_binary:
            continue
        x = lp_result.values[v.id]
        f = x - math.floor(x)
        if not (eps_int < f < 1 - eps_int):
            continue
        score = round(abs(x - 0.5), 9)
        if best is None or score < best[0]:
            best = (score, v.id)
    if best is None:
        raise ValueError("nothing to branch")
    base = node.id * 2 + 1 if next_id is None else next_id
    return node.child(base, best[1], 0), node.child(base + 1, best[1], 1)


def propagate(node: NodeState, program: MixedBinaryProgram,
              handlers: Iterable[ActivationHandler] = (),
              config: SolverConfig | None = None) -> PropagationResult:
    """Standalone propagation of ``node`` (modified in place)."""
    return BranchAndBound(program, config, list(handlers)).propagate(node)


def solve(program: MixedBinaryProgram, config: SolverConfig | None = None,
          handlers: Sequence[ActivationHandler] = (), **kwargs) -> SolveReport:
    return BranchAndBound(program, config, handlers, **kwargs).solve()
