"""Activation handlers, static sub-symmetry-handling inequalities, and settings.

Handlers read only the node's fixing sets. Each returned :class:`Activation`
asks the engine to order the columns of a submatrix lexicographically
non-increasing, which is valid because every feasible completion of the
node lies in a set that is invariant under permuting those columns on those
rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .engine import Activation, NodeState, StaticOrbitope
from .instances import MKCS, MKP, MUCP, Problem
from .instances.mkcs import MkcsData
from .instances.mkp import MkpData, build_mkp, y_var
from .instances.mucp import MucpData, build_mucp, u_var, x_var
from .model import (BINARY, CONTINUOUS, FULL, PACKING, PARTITIONING, LinearConstraint,
                    MixedBinaryProgram, VariableDecl)

NO_SYM = "no-sym"
ORBITOPE = "orbitope"
INEQ = "ineq"
ACT = "act"
ACT_CONSEC = "act-consec"
ACT_ALLPAIRS = "act-allpairs"
SETTINGS = (NO_SYM, ORBITOPE, INEQ, ACT, ACT_CONSEC, ACT_ALLPAIRS)

CONSECUTIVE = "consecutive"
ALL_PAIRS = "all_pairs"


class UnsupportedSetting(ValueError):
    pass


# -- multiple knapsack --------------------------------------------------------------


class MkpActivationHandler:
    """Capacity sub-symmetries among knapsacks with equal remaining capacity."""

    def __init__(self, data: MkpData, partitioning_variant: bool = False):
        self.data = data
        self.matrix = data.matrix
        self.partitioning_variant = partitioning_variant

    def activations(self, node: NodeState, program=None) -> list[Activation]:
        data, entries = self.data, self.matrix.entries
        m, n = data.m, data.n
        remaining = list(data.capacities)
        out = []
        for i in range(m):
            groups: dict[int, list[int]] = {}
            for j, cap in enumerate(remaining):
                groups.setdefault(cap, []).append(j)
            for cols in groups.values():
                if len(cols) < 2:
                    continue
                kind = PACKING
                if self.partitioning_variant and len(cols) == n:
                    kind = PARTITIONING
                out.append(Activation(self.matrix.submatrix(range(i, m), cols), kind))
            # row i must be fully decided before row i + 1 can be considered
            row = entries[i]
            if not all(node.is_fixed(v) for v in row):
                break
            w = data.weights[i]
            for j, v in enumerate(row):
                if v in node.fixed_one:
                    remaining[j] -= w
        return out


def mkp_shis(data: MkpData) -> tuple[list[VariableDecl], list[LinearConstraint]]:
    """Linearized capacity SHIs for consecutive knapsack pairs.

    For item ``i`` and knapsacks ``j, j+1`` the quantity
    ``alpha = c_j - c_{j+1} - sum_{k<i} w_k (y_kj - y_k,j+1)`` is split as
    ``alpha+ - alpha-`` with indicator binaries ``z+, z-``; the SHI
    ``y_{i,j+1} <= z+ + z- + y_{i,j}`` then binds only when ``alpha = 0``.
    """
    variables: list[VariableDecl] = []
    cons: list[LinearConstraint] = []
    w, c = data.weights, data.capacities
    for j in range(data.n - 1):
        jp = j + 1
        for i in range(data.m):
            big_m = max(c[j], c[jp]) + sum(w[:i])
            tag = f"{i + 1},{j + 1}"
            ap, an, zp, zn = (f"{name}[{tag}]" for name in ("alpha+", "alpha-", "z+", "z-"))
            variables += [VariableDecl(ap, CONTINUOUS, 0, big_m, 0),
                          VariableDecl(an, CONTINUOUS, 0, big_m, 0),
                          VariableDecl(zp, BINARY, 0, 1, 0),
                          VariableDecl(zn, BINARY, 0, 1, 0)]
            cons.append(LinearConstraint(((ap, 1), (zp, -big_m)), None, 0, f"shi_pos[{tag}]"))
            cons.append(LinearConstraint(((an, 1), (zn, -big_m)), None, 0, f"shi_neg[{tag}]"))
            cons.append(LinearConstraint(((ap, 1), (an, 1), (zp, -1), (zn, -1)), 0, None,
                                         f"shi_nonzero[{tag}]"))
            # alpha+ - alpha- + sum_k w_k (y_kj - y_kj') = c_j - c_j'
            terms = [(ap, 1), (an, -1)]
            for k in range(i):
                terms += [(y_var(k, j), w[k]), (y_var(k, jp), -w[k])]
            cons.append(LinearConstraint(tuple(terms), c[j] - c[jp], c[j] - c[jp],
                                         f"shi_alpha[{tag}]"))
            cons.append(LinearConstraint(((zp, 1), (zn, 1)), None, 1, f"shi_onez[{tag}]"))
            cons.append(LinearConstraint(((y_var(i, jp), 1), (zp, -1), (zn, -1), (y_var(i, j), -1)),
                                         None, 0, f"shi[{tag}]"))
    return variables, cons


# -- unit commitment ------------------------------------------------------------------


class MucpActivationHandler:
    """Start-up and shut-down sub-symmetries among identical units."""

    def __init__(self, data: MucpData, startup: bool = True, shutdown: bool = True):
        self.data = data
        self.startup = startup
        self.shutdown = shutdown
        self.matrices = data.matrices

    def activations(self, node: NodeState, program=None) -> list[Activation]:
        out = []
        T = self.data.periods
        for ut, mat in zip(self.data.types, self.matrices):
            if mat.cols < 2:
                continue
            cases = []
            if self.startup:
                cases.append((node.fixed_zero, ut.min_down))
            if self.shutdown:
                cases.append((node.fixed_one, ut.min_up))
            for fixed, window in cases:
                # run[c] = number of consecutive periods up to t-1 whose x is in `fixed`
                run = [0] * mat.cols
                for t in range(T):
                    if t >= window:
                        ready = [c for c in range(mat.cols) if run[c] >= window]
                        if len(ready) >= 2:
                            out.append(Activation(mat.submatrix(range(t, T), ready), FULL))
                    row = mat.entries[t]
                    for c in range(mat.cols):
                        run[c] = run[c] + 1 if row[c] in fixed else 0
        return out


def mucp_shis(data: MucpData, strengthened: bool = True) -> list[LinearConstraint]:
    """Start-up and shut-down SHIs for consecutive units of the same type."""
    cons = []
    T = data.periods
    for ut, units in zip(data.types, data.units_of_type()):
        lo, up = ut.min_down, ut.min_up
        for j, jp in zip(units, units[1:]):
            for t in range(lo, T):
                tag = f"{t + 1},{j + 1}"
                if strengthened:
                    # u[t,j'] <= x[t-l,j] + x[t,j] + sum_{t-l<s<t} u[s,j]
                    terms = [(u_var(t, jp), 1), (x_var(t - lo, j), -1), (x_var(t, j), -1)]
                    terms += [(u_var(s, j), -1) for s in range(t - lo + 1, t)]
                else:
                    # x[t,j'] <= sum_{t-l<=s<t} (x[s,j] + x[s,j']) + x[t,j]
                    terms = [(x_var(t, jp), 1), (x_var(t, j), -1)]
                    terms += [(x_var(s, k), -1) for s in range(t - lo, t) for k in (j, jp)]
                cons.append(LinearConstraint(tuple(terms), None, 0, f"shi_start[{tag}]"))
            for t in range(up, T):
                tag = f"{t + 1},{j + 1}"
                if strengthened:
                    # x[t-1,j] - x[t,j] + u[t,j] + x[t,j'] + x[t-1,j'] - sum_{t-L<s<t} u[s,j'] <= 2
                    terms = [(x_var(t - 1, j), 1), (x_var(t, j), -1), (u_var(t, j), 1),
                             (x_var(t, jp), 1), (x_var(t - 1, jp), 1)]
                    terms += [(u_var(s, jp), -1) for s in range(t - up + 1, t)]
                    cons.append(LinearConstraint(_merge(terms), None, 2, f"shi_shut[{tag}]"))
                else:
                    # x[t,j'] <= sum_{t-L<=s<t} ((1-x[s,j]) + (1-x[s,j'])) + x[t,j]
                    terms = [(x_var(t, jp), 1), (x_var(t, j), -1)]
                    terms += [(x_var(s, k), 1) for s in range(t - up, t) for k in (j, jp)]
                    cons.append(LinearConstraint(tuple(terms), None, 2 * up, f"shi_shut[{tag}]"))
    return cons


def _merge(terms):
    acc: dict[str, int] = {}
    for vid, a in terms:
        acc[vid] = acc.get(vid, 0) + a
    return tuple((vid, a) for vid, a in acc.items() if a)


# -- max k-colorable subgraph --------------------------------------------------------


class MkcsActivationHandler:
    """Color-pair sub-symmetries on components avoiding both colors at the boundary."""

    def __init__(self, data: MkcsData, pair_mode: str = ALL_PAIRS):
        if pair_mode not in (CONSECUTIVE, ALL_PAIRS):
            raise ValueError(f"unknown pair mode {pair_mode!r}")
        self.data = data
        self.matrix = data.matrix
        self.pair_mode = pair_mode
        self.adj = data.graph.adjacency()
        k = data.k
        if pair_mode == CONSECUTIVE:
            self.pairs = [(r, r + 1) for r in range(k - 1)]
        else:
            self.pairs = list(combinations(range(k), 2))

    def activations(self, node: NodeState, program=None) -> list[Activation]:
        out = []
        entries, adj, n = self.matrix.entries, self.adj, self.data.graph.n
        zero = node.fixed_zero
        for c1, c2 in self.pairs:
            inside = [not (entries[i][c1] in zero and entries[i][c2] in zero) for i in range(n)]
            seen = [False] * n
            for s in range(n):
                if not inside[s] or seen[s]:
                    continue
                seen[s] = True
                comp, stack = [], [s]
                while stack:
                    v = stack.pop()
                    comp.append(v)
                    for w in adj[v]:
                        if inside[w] and not seen[w]:
                            seen[w] = True
                            stack.append(w)
                if len(comp) >= 2:
                    out.append(Activation(self.matrix.submatrix(sorted(comp), (c1, c2)), PACKING))
        return out


def shi_subsymmetries(problem: Problem, point: dict) -> list:
    """Submatrices whose sub-symmetric solution subsets (as used by the SHIs) contain ``point``.

    ``point`` maps symmetry variables to 0/1. Only the consecutive pairs the
    inequalities cover are listed.
    """
    out = []
    data = problem.data
    if problem.kind == MKP:
        mat = data.matrix
        remaining = list(data.capacities)
        for i in range(data.m):
            for j in range(data.n - 1):
                if remaining[j] == remaining[j + 1]:
                    out.append(mat.submatrix(range(i, data.m), (j, j + 1)))
            for j in range(data.n):
                if point[y_var(i, j)]:
                    remaining[j] -= data.weights[i]
    elif problem.kind == MUCP:
        T = data.periods
        for ut, mat in zip(data.types, data.matrices):
            for c in range(mat.cols - 1):
                for value, window in ((0, ut.min_down), (1, ut.min_up)):
                    for t in range(window, T):
                        if all(point[mat.entries[s][cc]] == value
                               for s in range(t - window, t) for cc in (c, c + 1)):
                            out.append(mat.submatrix(range(t, T), (c, c + 1)))
    return out


# -- settings -----------------------------------------------------------------------


@dataclass(frozen=True)
class Configured:
    program: MixedBinaryProgram
    handlers: tuple


def _static(program: MixedBinaryProgram, roles=None) -> list[StaticOrbitope]:
    return [StaticOrbitope(mat) for mat in program.matrices
            if mat.symmetric and mat.cols >= 2 and (roles is None or mat.role in roles)]


def configure(problem: Problem, setting: str, partitioning_variant: bool = False) -> Configured:
    """Program and handler list for one (problem, setting) pair.

    ``act`` on MKCS means all color pairs. ``ineq`` is not defined for MKCS.
    """
    if setting not in SETTINGS:
        raise UnsupportedSetting(f"unknown setting {setting!r}")
    kind, data = problem.kind, problem.data
    if kind == MKP:
        base = build_mkp(data)
        items = _static(base, {"items"})
        if setting == NO_SYM:
            return Configured(base, ())
        if setting == ORBITOPE:
            return Configured(base, tuple(_static(base)))
        if setting == INEQ:
            variables, cons = mkp_shis(data)
            return Configured(base.extend(variables, cons), tuple(items))
        if setting == ACT:
            return Configured(base, tuple(items) + (MkpActivationHandler(data, partitioning_variant),))
    elif kind == MUCP:
        base = build_mucp(data)
        if setting == NO_SYM:
            return Configured(base, ())
        if setting == ORBITOPE:
            return Configured(base, tuple(_static(base)))
        if setting == INEQ:
            return Configured(base.extend(constraints=mucp_shis(data, strengthened=True)), ())
        if setting == ACT:
            return Configured(base, tuple(_static(base)) + (MucpActivationHandler(data),))
    elif kind == MKCS:
        base = problem.build()
        if setting == NO_SYM:
            return Configured(base, ())
        if setting == ORBITOPE:
            return Configured(base, tuple(_static(base)))
        if setting in (ACT, ACT_ALLPAIRS, ACT_CONSEC):
            mode = CONSECUTIVE if setting == ACT_CONSEC else ALL_PAIRS
            return Configured(base, tuple(_static(base)) + (MkcsActivationHandler(data, mode),))
    raise UnsupportedSetting(f"setting {setting!r} is not available for {kind}")


def settings_for(kind: str) -> tuple[str, ...]:
    if kind == MKCS:
        return (NO_SYM, ORBITOPE, ACT_CONSEC, ACT_ALLPAIRS)
    return (NO_SYM, ORBITOPE, INEQ, ACT)
