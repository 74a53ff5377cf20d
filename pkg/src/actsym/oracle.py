"""Brute-force ground truth for tiny programs.

Feasible points are enumerated by depth-first search over the binary
variables with exact integer activity bounds for pruning. Continuous
variables are resolved at each leaf by an exact rational LP, so a leaf is one
0/1 pattern together with its best continuous completion.

Symmetry questions are asked on the *symmetry variables*: the entries of
the program's declared matrices, in declaration order. A pattern over those
variables is feasible when some completion is, and its value is the best
completion objective.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import lp as lpmod
from .model import (FULL, MAXIMIZE, PACKING, PARTITIONING, MixedBinaryProgram, Submatrix,
                    evaluate)
from .orbitope import FixDelta, columns_sorted

MAX_BINARIES = 24
MAX_GRID_CELLS = 16


class OracleLimit(ValueError):
    pass


@dataclass(frozen=True)
class Solution:
    assignment: dict
    objective: Fraction


def _scaled_rows(program: MixedBinaryProgram):
    """Constraints as ``(terms [(pos, a)], lo, hi)`` with integer coefficients.

    Denominators are cleared per row. Rows over binaries only get their
    bounds rounded inward (integral activity); others keep rational bounds.
    """
    idx = program.index
    rows = []
    for con in program.constraints:
        coefs = [c for _, c in con.terms]
        bounds = [b for b in (con.lower, con.upper) if b is not None]
        scale = math.lcm(*(Fraction(x).denominator for x in coefs + bounds)) if coefs else 1
        terms = [(idx[v], int(c * scale)) for v, c in con.terms]
        lo = None if con.lower is None else con.lower * scale
        hi = None if con.upper is None else con.upper * scale
        if all(program.variables[pos].is_binary for pos, _ in terms):
            lo = None if lo is None else math.ceil(lo)
            hi = None if hi is None else math.floor(hi)
        rows.append((terms, lo, hi))
    return rows


def _bound_contrib(v, a):
    lo, hi = a * v.lower, a * v.upper
    if v.is_binary:
        lo, hi = int(lo), int(hi)
    return min(lo, hi), max(lo, hi)


class _ContinuousBounds:
    """Exact bound tightening over the rows that contain continuous variables."""

    ROUNDS = 25

    def __init__(self, program, rows, continuous):
        variables = program.variables
        self.variables = variables
        self.rows = [(r, terms, lo, hi) for r, (terms, lo, hi) in enumerate(rows)
                     if any(not variables[pos].is_binary for pos, _ in terms)]
        self.lower = {i: Fraction(variables[i].lower) for i in continuous}
        self.upper = {i: Fraction(variables[i].upper) for i in continuous}

    def tighten(self, values, assigned) -> bool:
        """Tighten in place; False when some row cannot be satisfied."""
        lower, upper = self.lower, self.upper
        for _ in range(self.ROUNDS):
            changed = False
            for _, terms, lo, hi in self.rows:
                amin = amax = Fraction(0)
                parts = []
                for pos, a in terms:
                    if pos in lower:
                        c1, c2 = a * lower[pos], a * upper[pos]
                    elif assigned[pos]:
                        c1 = c2 = a * values[pos]
                    else:
                        c1, c2 = 0, a
                    cmin, cmax = min(c1, c2), max(c1, c2)
                    amin += cmin
                    amax += cmax
                    parts.append((pos, a, cmin, cmax))
                if (hi is not None and amin > hi) or (lo is not None and amax < lo):
                    return False
                for pos, a, cmin, cmax in parts:
                    if pos not in lower:
                        continue
                    # a * x <= hi - (amin - cmin) and a * x >= lo - (amax - cmax)
                    top = None if hi is None else hi - (amin - cmin)
                    bot = None if lo is None else lo - (amax - cmax)
                    if a < 0:
                        top, bot = bot, top
                    new_hi = None if top is None else Fraction(top) / a
                    new_lo = None if bot is None else Fraction(bot) / a
                    if new_hi is not None and new_hi < upper[pos]:
                        upper[pos] = new_hi
                        changed = True
                    if new_lo is not None and new_lo > lower[pos]:
                        lower[pos] = new_lo
                        changed = True
                    if lower[pos] > upper[pos]:
                        return False
            if not changed:
                break
        return True

    def save(self):
        return dict(self.lower), dict(self.upper)

    def restore(self, state):
        self.lower, self.upper = dict(state[0]), dict(state[1])


def enumerate_feasible(program: MixedBinaryProgram, max_binaries: int = MAX_BINARIES,
                       fixed: Mapping[str, int] | None = None) -> list[Solution]:
    """Every feasible 0/1 pattern with its best completion (exact).

    ``fixed`` optionally pins binaries to values (used for node completions).
    """
    variables = program.variables
    binaries = [i for i, v in enumerate(variables) if v.is_binary]
    if len(binaries) > max_binaries:
        raise OracleLimit(f"{len(binaries)} binary variables exceed the oracle cap of "
                          f"{max_binaries}")
    continuous = [i for i, v in enumerate(variables) if not v.is_binary]
    fixed = dict(fixed or {})
    rows = _scaled_rows(program)
    by_var: dict[int, list[tuple[int, int, int, int]]] = {}
    lo_act, hi_act = [], []
    for r, (terms, _, _) in enumerate(rows):
        lo_sum = hi_sum = 0
        for pos, a in terms:
            v = variables[pos]
            clo, chi = _bound_contrib(v, a)
            lo_sum += clo
            hi_sum += chi
            if v.is_binary:
                by_var.setdefault(pos, []).append((r, a, clo, chi))
        lo_act.append(lo_sum)
        hi_act.append(hi_sum)
    row_lo = [lo for _, lo, _ in rows]
    row_hi = [hi for _, _, hi in rows]

    def violated(r):
        lo, hi = row_lo[r], row_hi[r]
        return (hi is not None and lo_act[r] > hi) or (lo is not None and hi_act[r] < lo)

    if any(violated(r) for r in range(len(rows))):
        return []
    exact_relax = lpmod.LpRelaxation(program, exact=True) if continuous else None
    cbounds = _ContinuousBounds(program, rows, continuous) if continuous else None
    ids = [v.id for v in variables]
    objective = [v.objective for v in variables]
    out: list[Solution] = []
    values = [0] * len(variables)
    assigned = [False] * len(variables)

    def assign(pos, val):
        bad = False
        for r, a, clo, chi in by_var.get(pos, ()):
            lo_act[r] += a * val - clo
            hi_act[r] += a * val - chi
            bad = bad or violated(r)
        return bad

    def unassign(pos, val):
        for r, a, clo, chi in by_var.get(pos, ()):
            lo_act[r] -= a * val - clo
            hi_act[r] -= a * val - chi

    def leaf():
        assignment = {ids[i]: Fraction(values[i]) for i in binaries}
        if not continuous:
            # every row is fully assigned, so the pruning check was exact
            obj = sum((objective[i] for i in binaries if values[i]), Fraction(0))
            out.append(Solution(assignment, obj))
            return
        lower, upper = exact_relax.lower.copy(), exact_relax.upper.copy()
        for i in binaries:
            lower[i] = upper[i] = Fraction(values[i])
        for i in continuous:
            lower[i], upper[i] = cbounds.lower[i], cbounds.upper[i]
        res = exact_relax.solve(lower, upper)
        if res.status != lpmod.OPTIMAL:
            return
        for i in continuous:
            assignment[ids[i]] = Fraction(res.values[ids[i]])
        ev = evaluate(program, assignment)
        if ev.feasible:
            out.append(Solution(assignment, ev.objective))

    def dfs(k):
        if k == len(binaries):
            leaf()
            return
        pos = binaries[k]
        v = variables[pos]
        choices = [fixed[ids[pos]]] if ids[pos] in fixed else range(int(v.lower), int(v.upper) + 1)
        for val in choices:
            values[pos] = val
            assigned[pos] = True
            if not assign(pos, val):
                if cbounds is None:
                    dfs(k + 1)
                else:
                    saved = cbounds.save()
                    if cbounds.tighten(values, assigned):
                        dfs(k + 1)
                    cbounds.restore(saved)
            unassign(pos, val)
        values[pos] = 0
        assigned[pos] = False

    if cbounds is not None and not cbounds.tighten(values, assigned):
        return []
    dfs(0)
    return out


def optimum(program: MixedBinaryProgram, max_binaries: int = MAX_BINARIES) -> Fraction | None:
    sols = enumerate_feasible(program, max_binaries)
    if not sols:
        return None
    objs = [s.objective for s in sols]
    return max(objs) if program.sense == MAXIMIZE else min(objs)


def symmetry_variables(program: MixedBinaryProgram) -> tuple[str, ...]:
    """Entries of all declared matrices, in variable declaration order."""
    used = {v for mat in program.matrices for v in mat.variables()}
    return tuple(v.id for v in program.variables if v.id in used)


def project(program: MixedBinaryProgram, solutions: Iterable[Solution],
            variables: Sequence[str]) -> dict[tuple, Fraction]:
    """Pattern over ``variables`` -> best objective among solutions with that pattern."""
    best: dict[tuple, Fraction] = {}
    for s in solutions:
        key = tuple(int(s.assignment[v]) for v in variables)
        if key not in best or program.better(s.objective, best[key]):
            best[key] = s.objective
    return best


@dataclass(frozen=True)
class Orbit:
    members: frozenset
    representative: tuple
    objective: Fraction


class Patterns:
    """Feasible patterns of a program over its symmetry variables."""

    def __init__(self, program: MixedBinaryProgram, variables: Sequence[str] | None = None,
                 max_binaries: int = MAX_BINARIES):
        self.program = program
        self.variables = tuple(variables) if variables is not None else symmetry_variables(program)
        self.position = {v: i for i, v in enumerate(self.variables)}
        self.values = project(program, enumerate_feasible(program, max_binaries), self.variables)

    def permuted(self, pattern: tuple, sub: Submatrix, perm: Sequence[int]) -> tuple:
        """Image of ``pattern`` when column ``c`` of ``sub`` receives column ``perm[c]``."""
        out = list(pattern)
        pos = self.position
        for r in range(len(sub.row_set)):
            for c, src in enumerate(perm):
                out[pos[sub.entry(r, c)]] = pattern[pos[sub.entry(r, src)]]
        return tuple(out)

    def consistent(self, pattern: tuple, fixed_zero, fixed_one) -> bool:
        pos = self.position
        return (all(pattern[pos[v]] == 0 for v in fixed_zero if v in pos)
                and all(pattern[pos[v]] == 1 for v in fixed_one if v in pos))


class UnsoundSymmetry(AssertionError):
    pass


def _as_submatrix(obj) -> Submatrix:
    """Accept a Submatrix, an Activation or a whole VarMatrix."""
    if isinstance(obj, Submatrix):
        return obj
    if hasattr(obj, "target"):
        return obj.target
    return obj.submatrix()


def _perms(k: int):
    return list(itertools.permutations(range(k)))[1:]


def enumerate_orbits(program: MixedBinaryProgram, groups: Iterable = (),
                     conditional: Iterable[tuple] = (),
                     point_groups: Callable[[dict], Iterable[Submatrix]] | None = None,
                     patterns: Patterns | None = None) -> list[Orbit]:
    """Classes of feasible patterns under column permutations.

    ``groups``: submatrices (or activations) whose column permutations apply to
    every feasible point. ``conditional``: ``(submatrix, F0, F1)`` triples that
    apply only to points consistent with the fixings. ``point_groups`` maps a
    point (variable -> value) to the submatrices whose sub-symmetric subsets
    contain it. An image that is infeasible or changes the objective raises
    :class:`UnsoundSymmetry`.
    """
    pats = patterns or Patterns(program)
    values = pats.values
    keys = list(values)
    parent = {k: k for k in keys}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def apply(p, sub):
        for perm in _perms(len(sub.col_list)):
            q = pats.permuted(p, sub, perm)
            if q not in values or values[q] != values[p]:
                raise UnsoundSymmetry(f"permuting columns {sub.col_list} on rows {sub.row_set} "
                                      f"of {sub.matrix.label!r} maps a feasible point to "
                                      f"{'an infeasible one' if q not in values else 'a different objective'}")
            a, b = find(p), find(q)
            if a != b:
                parent[a] = b

    subs = [_as_submatrix(g) for g in groups]
    cond = [(_as_submatrix(s), frozenset(f0), frozenset(f1)) for s, f0, f1 in conditional]
    for p in keys:
        for sub in subs:
            apply(p, sub)
        for sub, f0, f1 in cond:
            if pats.consistent(p, f0, f1):
                apply(p, sub)
        if point_groups is not None:
            point = dict(zip(pats.variables, p))
            for sub in point_groups(point):
                apply(p, _as_submatrix(sub))
    classes: dict[tuple, list[tuple]] = {}
    for k in keys:
        classes.setdefault(find(k), []).append(k)
    return [Orbit(frozenset(ms), max(ms), values[ms[0]]) for ms in classes.values()]


def orbits_without_survivor(orbits: Iterable[Orbit], survivors: Iterable[tuple]) -> list[Orbit]:
    alive = set(survivors)
    return [o for o in orbits if alive.isdisjoint(o.members)]


class ActivationVerifier:
    """Checks activations against the brute-force feasible set."""

    def __init__(self, program: MixedBinaryProgram, patterns: Patterns | None = None):
        self.patterns = patterns or Patterns(program)
        self.checked = 0

    def check(self, node, act) -> None:
        """Every completion of ``node`` keeps feasibility and value under all column perms."""
        pats = self.patterns
        sub = _as_submatrix(act)
        perms = _perms(len(sub.col_list))
        for p, val in pats.values.items():
            if not pats.consistent(p, node.fixed_zero, node.fixed_one):
                continue
            for perm in perms:
                q = pats.permuted(p, sub, perm)
                if pats.values.get(q) != val:
                    raise UnsoundSymmetry(
                        f"activation on {sub.matrix.label!r} rows {sub.row_set} cols "
                        f"{sub.col_list} at node {node.id} is unsound for point {p}")
        self.checked += 1


def check_activation(program: MixedBinaryProgram, node, act) -> None:
    ActivationVerifier(program).check(node, act)


_ROW_RULES = {
    FULL: lambda row: True,
    PACKING: lambda row: sum(row) <= 1,
    PARTITIONING: lambda row: sum(row) == 1,
}


def forced_cells(grid: Sequence[Sequence[int | None]], kind: str = FULL) -> FixDelta:
    """Reference orbitopal fixing by enumerating all completions."""
    m = len(grid)
    n = len(grid[0]) if m else 0
    if m * n > MAX_GRID_CELLS:
        raise OracleLimit(f"grid with {m * n} cells exceeds the oracle cap of {MAX_GRID_CELLS}")
    rule = _ROW_RULES[kind]
    free = [(r, c) for r in range(m) for c in range(n) if grid[r][c] is None]
    seen0: set = set()
    seen1: set = set()
    any_member = False
    base = [list(row) for row in grid]
    for bits in itertools.product((0, 1), repeat=len(free)):
        for (r, c), b in zip(free, bits):
            base[r][c] = b
        if not all(rule(row) for row in base) or not columns_sorted(base):
            continue
        any_member = True
        for cell, b in zip(free, bits):
            (seen1 if b else seen0).add(cell)
    if not any_member:
        return FixDelta([], True)
    fixings = [(r, c, 0 if (r, c) in seen0 else 1) for r, c in free
               if ((r, c) in seen0) != ((r, c) in seen1)]
    return FixDelta(sorted(fixings), False)
