"""Dense bounded-variable primal simplex for node LP relaxations.

The LP solved is ``min c.x  s.t.  lo <= A x <= hi,  lb <= x <= ub`` with all
variable bounds finite. Each row gets a logical variable ``s = A x`` carrying
the row bounds, so the equality system is ``A x - s = 0``. Rows whose logical
cannot start basic within its bounds receive an artificial variable and a
phase 1 minimizes the sum of artificials.

The same code runs on float64 arrays (tolerances from the config) or on
object arrays of Fractions with zero tolerances, which the oracle and the
incumbent check use to obtain exact continuous completions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .model import MAXIMIZE, MixedBinaryProgram

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_AT_LOWER = 0
_AT_UPPER = 1
_BASIC = 2


class IterationLimit(RuntimeError):
    """Raised when the simplex exceeds its iteration cap."""

    def __init__(self, iterations: int):
        super().__init__(f"iteration limit ({iterations} pivots)")
        self.iterations = iterations


@dataclass
class LpResult:
    status: str
    objective: float | Fraction | None = None
    values: dict = field(default_factory=dict)
    dual_bound: float | Fraction | None = None
    iterations: int = 0


@dataclass
class SimplexOptions:
    eps_feas: float = 1e-7
    eps_opt: float = 1e-7
    eps_pivot: float = 1e-9
    degenerate_limit: int = 100
    max_iterations: int = 50_000
    refresh_every: int = 50


class _Simplex:
    """One LP instance in computational form; ``run`` performs both phases."""

    def __init__(self, A, row_lo, row_hi, c, lb, ub, opts: SimplexOptions, exact: bool):
        self.exact = exact
        self.opts = opts
        zero = Fraction(0) if exact else 0.0
        self.zero = zero
        m, n = A.shape
        self.m, self.n = m, n
        inf = math.inf

        x0 = lb.copy()
        r = A.dot(x0) if m else np.zeros(0, dtype=A.dtype)

        art_rows = []
        s_nonbasic_val = {}
        for i in range(m):
            lo, hi = row_lo[i], row_hi[i]
            if lo is not None and r[i] < lo:
                art_rows.append(i)
                s_nonbasic_val[i] = (lo, _AT_LOWER)
            elif hi is not None and r[i] > hi:
                art_rows.append(i)
                s_nonbasic_val[i] = (hi, _AT_UPPER)
        k = len(art_rows)
        N = n + m + k
        self.N = N
        self.art_start = n + m

        dtype = object if exact else float
        M = np.zeros((m, N), dtype=dtype)
        if exact:
            M[:, :] = zero
        M[:, :n] = A
        for i in range(m):
            M[i, n + i] = -1
        sign = {}
        for a, i in enumerate(art_rows):
            bval, _ = s_nonbasic_val[i]
            e = r[i] - bval
            sign[i] = 1 if e > 0 else -1
            M[i, n + m + a] = -sign[i]

        self.lb = np.empty(N, dtype=dtype)
        self.ub = np.empty(N, dtype=dtype)
        self.lb[:n] = lb
        self.ub[:n] = ub
        for i in range(m):
            self.lb[n + i] = -inf if row_lo[i] is None else row_lo[i]
            self.ub[n + i] = inf if row_hi[i] is None else row_hi[i]
        self.lb[n + m:] = zero
        self.ub[n + m:] = inf

        self.status = np.full(N, _AT_LOWER, dtype=np.int8)
        self.basis = np.empty(m, dtype=np.int64)
        self.xB = np.empty(m, dtype=dtype)
        art_of_row = {i: n + m + a for a, i in enumerate(art_rows)}
        D = np.empty(m, dtype=dtype)
        for i in range(m):
            if i in art_of_row:
                j = art_of_row[i]
                bval, st = s_nonbasic_val[i]
                self.status[n + i] = st
                self.basis[i] = j
                self.xB[i] = abs(r[i] - bval)
                D[i] = -sign[i]
            else:
                self.basis[i] = n + i
                self.xB[i] = r[i]
                D[i] = -1
            self.status[self.basis[i]] = _BASIC
        # B is diagonal with entries D, so B^-1 M = D * M row-wise
        self.T = M * D[:, None] if m else M
        self.c_phase2 = np.zeros(N, dtype=dtype)
        if exact:
            self.c_phase2[:] = zero
        self.c_phase2[:n] = c
        self.iterations = 0
        self.degenerate = 0
        self.bland = exact

    # -- helpers --------------------------------------------------------------

    def _nonbasic_values(self):
        vals = np.where(self.status == _AT_UPPER, self.ub, self.lb)
        vals[self.basis] = self.zero
        return vals

    def _refresh_xB(self):
        xN = self._nonbasic_values()
        self.xB = -(self.T.dot(xN))

    def values(self):
        vals = self._nonbasic_values()
        vals[self.basis] = self.xB
        return vals

    # -- core loop --------------------------------------------------------------

    def _iterate(self, cost, eps_opt, eps_piv):
        opts = self.opts
        m = self.m
        while True:
            cB = cost[self.basis]
            d = cost - cB.dot(self.T) if m else cost.copy()
            movable = self.lb < self.ub
            inc = (self.status == _AT_LOWER) & movable & (d < -eps_opt)
            dec = (self.status == _AT_UPPER) & movable & (d > eps_opt)
            cand = np.flatnonzero(inc | dec)
            if cand.size == 0:
                return OPTIMAL, d
            if self.bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand].astype(float)))])
            direction = 1 if inc[q] else -1

            self.iterations += 1
            if self.iterations > opts.max_iterations:
                raise IterationLimit(self.iterations)

            alpha = self.T[:, q] if m else np.zeros(0)
            step = self.ub[q] - self.lb[q]
            leave = -1
            leave_to = _AT_LOWER
            if m:
                a = alpha * direction
                pos = a > eps_piv
                neg = a < -eps_piv
                ratios = np.full(m, math.inf, dtype=self.T.dtype)
                if pos.any():
                    lbB = self.lb[self.basis[pos]]
                    ratios[pos] = (self.xB[pos] - lbB) / a[pos]
                if neg.any():
                    ubB = self.ub[self.basis[neg]]
                    ratios[neg] = (ubB - self.xB[neg]) / (-a[neg])
                ratios = np.where(ratios < 0, self.zero, ratios)
                tmin = ratios.min()
                if tmin < step:
                    tie = self.zero if self.exact else 1e-12
                    ties = np.flatnonzero(ratios <= tmin + tie)
                    if self.bland:
                        i = int(ties[np.argmin(self.basis[ties])])
                    else:
                        i = int(ties[np.argmax(np.abs(a[ties].astype(float)))])
                    step, leave = ratios[i], i
                    leave_to = _AT_LOWER if pos[i] else _AT_UPPER
            if step == math.inf:
                return UNBOUNDED, d

            if step <= eps_piv:
                self.degenerate += 1
                if self.degenerate >= opts.degenerate_limit:
                    self.bland = True
            else:
                self.degenerate = 0

            if m:
                self.xB = self.xB - (direction * step) * alpha
            if leave < 0:
                self.status[q] = _AT_UPPER if direction > 0 else _AT_LOWER
                continue

            entering_val = (self.lb[q] if self.status[q] == _AT_LOWER else self.ub[q]) + direction * step
            out = self.basis[leave]
            self.status[out] = leave_to
            self.status[q] = _BASIC
            self.basis[leave] = q
            self.xB[leave] = entering_val
            piv_row = self.T[leave] / alpha[leave]
            self.T = self.T - np.outer(alpha, piv_row)
            self.T[leave] = piv_row
            if not self.exact and self.iterations % opts.refresh_every == 0:
                self._refresh_xB()

    def run(self):
        opts = self.opts
        eps_opt = self.zero if self.exact else opts.eps_opt
        eps_piv = self.zero if self.exact else opts.eps_pivot
        eps_feas = self.zero if self.exact else opts.eps_feas
        n, m = self.n, self.m
        if self.N > self.art_start:
            cost1 = np.zeros(self.N, dtype=self.T.dtype)
            if self.exact:
                cost1[:] = self.zero
            cost1[self.art_start:] = 1
            state, _ = self._iterate(cost1, eps_opt, eps_piv)
            if not self.exact:
                self._refresh_xB()
            infeas = sum(self.values()[self.art_start:])
            if infeas > eps_feas:
                return INFEASIBLE, None, None
            self.ub[self.art_start:] = self.zero
            for i in range(m):
                if self.basis[i] >= self.art_start:
                    self.xB[i] = self.zero
        state, d = self._iterate(self.c_phase2, eps_opt, eps_piv)
        if not self.exact:
            self._refresh_xB()
        if state == UNBOUNDED:
            return UNBOUNDED, None, None
        vals = self.values()
        x = vals[:n]
        obj = self.c_phase2[:n].dot(x) if n else self.zero
        # Lagrangian bound from the final reduced costs.
        bound = self.zero
        for j in range(self.N):
            if self.status[j] == _BASIC:
                continue
            dj = d[j]
            if abs(dj) <= eps_opt:
                continue
            if (dj > 0 and self.lb[j] == -math.inf) or (dj < 0 and self.ub[j] == math.inf):
                bound = -math.inf
                break
            bound += dj * (self.lb[j] if dj > 0 else self.ub[j])
        return OPTIMAL, x, (obj, bound)


def simplex(A, row_lo, row_hi, c, lb, ub, opts: SimplexOptions | None = None,
            exact: bool = False):
    """Minimize ``c.x``; returns ``(status, x, objective, dual_bound, iterations)``.

    ``row_lo``/``row_hi`` are sequences with None for an absent side.
    """
    opts = opts or SimplexOptions()
    sx = _Simplex(A, row_lo, row_hi, c, lb, ub, opts, exact)
    status, x, extra = sx.run()
    if status != OPTIMAL:
        return status, None, None, None, sx.iterations
    obj, bound = extra
    return status, x, obj, bound, sx.iterations


class LpRelaxation:
    """Continuous relaxation of a program, re-solvable under node bounds.

    Variables whose node bounds coincide are substituted out before the
    simplex runs, so deep nodes solve small LPs.
    """

    def __init__(self, program: MixedBinaryProgram, opts: SimplexOptions | None = None,
                 exact: bool = False):
        self.program = program
        self.opts = opts or SimplexOptions()
        self.exact = exact
        ids = [v.id for v in program.variables]
        self.ids = ids
        idx = program.index
        n, m = len(ids), len(program.constraints)
        dtype = object if exact else float
        conv = (lambda q: q) if exact else float
        A = np.zeros((m, n), dtype=dtype)
        if exact:
            A[:, :] = Fraction(0)
        lo, hi = [], []
        for i, con in enumerate(program.constraints):
            for vid, coef in con.terms:
                A[i, idx[vid]] = conv(coef)
            lo.append(None if con.lower is None else conv(con.lower))
            hi.append(None if con.upper is None else conv(con.upper))
        self.A = A
        self.row_lo = lo
        self.row_hi = hi
        sign = -1 if program.sense == MAXIMIZE else 1
        self.c = np.array([conv(sign * v.objective) for v in program.variables], dtype=dtype)
        self.sign = sign
        self.lower = np.array([conv(v.lower) for v in program.variables], dtype=dtype)
        self.upper = np.array([conv(v.upper) for v in program.variables], dtype=dtype)

    def bounds_from(self, node_bounds: Mapping[str, tuple] | None):
        lower = self.lower.copy()
        upper = self.upper.copy()
        if node_bounds:
            idx = self.program.index
            conv = (lambda q: Fraction(q)) if self.exact else float
            for vid, (lo, hi) in node_bounds.items():
                j = idx[vid]
                lower[j] = conv(lo)
                upper[j] = conv(hi)
        return lower, upper

    def solve(self, lower=None, upper=None) -> LpResult:
        lower = self.lower if lower is None else lower
        upper = self.upper if upper is None else upper
        opts = self.opts
        tol = 0 if self.exact else opts.eps_feas
        if np.any(lower > upper):
            return LpResult(INFEASIBLE)
        free = np.flatnonzero(lower < upper)
        fixed = np.flatnonzero(lower >= upper)
        A = self.A
        const = A[:, fixed].dot(lower[fixed]) if fixed.size else np.zeros(A.shape[0], dtype=A.dtype)
        Af = A[:, free]
        lb_f, ub_f = lower[free].copy(), upper[free].copy()
        keep = []
        lo_r, hi_r = [], []
        nnz = np.count_nonzero(Af != 0, axis=1) if free.size else np.zeros(A.shape[0], dtype=int)
        for i in range(A.shape[0]):
            lo, hi = self.row_lo[i], self.row_hi[i]
            lo_i = None if lo is None else lo - const[i]
            hi_i = None if hi is None else hi - const[i]
            if nnz[i] == 0:
                if (lo_i is not None and 0 < lo_i - tol) or (hi_i is not None and 0 > hi_i + tol):
                    return LpResult(INFEASIBLE)
                continue
            if nnz[i] == 1:
                # singleton row: becomes a bound on its variable
                k = int(np.flatnonzero(Af[i] != 0)[0])
                a = Af[i, k]
                b_lo = None if lo_i is None else lo_i / a
                b_hi = None if hi_i is None else hi_i / a
                if a < 0:
                    b_lo, b_hi = b_hi, b_lo
                if b_lo is not None and b_lo > lb_f[k]:
                    lb_f[k] = b_lo
                if b_hi is not None and b_hi < ub_f[k]:
                    ub_f[k] = b_hi
                if lb_f[k] > ub_f[k]:
                    if lb_f[k] > ub_f[k] + tol:
                        return LpResult(INFEASIBLE)
                    ub_f[k] = lb_f[k]
                continue
            keep.append(i)
            lo_r.append(lo_i)
            hi_r.append(hi_i)
        c_fixed = self.c[fixed].dot(lower[fixed]) if fixed.size else (Fraction(0) if self.exact else 0.0)
        x_full = lower.copy()
        iterations = 0
        if free.size:
            status, x, obj, bound, iterations = simplex(
                Af[keep], lo_r, hi_r, self.c[free], lb_f, ub_f, opts, self.exact)
            if status != OPTIMAL:
                return LpResult(status, iterations=iterations)
            x_full[free] = x
        else:
            obj, bound = (Fraction(0) if self.exact else 0.0), (Fraction(0) if self.exact else 0.0)
        total = obj + c_fixed
        dual = bound + c_fixed
        values = dict(zip(self.ids, x_full.tolist()))
        # report in the program's sense
        return LpResult(OPTIMAL, self.sign * total, values, self.sign * dual, iterations)


def solve_lp(program: MixedBinaryProgram, node_bounds: Mapping[str, tuple] | None = None,
             *, exact: bool = False, opts: SimplexOptions | None = None) -> LpResult:
    """Solve the continuous relaxation of ``program`` under ``node_bounds``."""
    relax = LpRelaxation(program, opts, exact=exact)
    lower, upper = relax.bounds_from(node_bounds)
    return relax.solve(lower, upper)
