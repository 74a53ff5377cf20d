"""Min-up/min-down unit commitment instances.

Formulation (units ``j``, periods ``t = 1..T``; all units start down):

* ``x[t,j]`` up indicator, ``u[t,j]`` start-up indicator, ``p[t,j]`` output;
* ``Pmin x <= p <= Pmax x`` and ``sum_j p[t,j] >= D_t``;
* ``u[t,j] >= x[t,j] - x[t-1,j]`` with ``x[0,j] = 0``;
* min-up: ``sum_{t'=t-L+1..t} u[t',j] <= x[t,j]``;
* min-down: ``sum_{t'=t-l+1..t} u[t',j] <= 1 - x[t-l,j]`` (``x`` before 1 is 0);
* minimize ``sum c0 u + cf x + cp p``.

With these constraints ``u`` is determined by ``x`` in every feasible point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..model import (BINARY, CONTINUOUS, FULL, MINIMIZE, LinearConstraint,
                     MixedBinaryProgram, VariableDecl, VarMatrix)
from .rng import stream, uniform_int

_UNITS, _DEMAND = 0, 1


def x_var(t: int, j: int) -> str:
    return f"x[{t + 1},{j + 1}]"


def u_var(t: int, j: int) -> str:
    return f"u[{t + 1},{j + 1}]"


def p_var(t: int, j: int) -> str:
    return f"p[{t + 1},{j + 1}]"


@dataclass(frozen=True)
class UnitType:
    count: int
    p_min: int
    p_max: int
    min_up: int
    min_down: int
    startup_cost: int
    fixed_cost: int
    production_cost: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("unit type needs at least one unit")
        if not 1 <= self.p_min <= self.p_max:
            raise ValueError("need 1 <= p_min <= p_max")


@dataclass(frozen=True)
class MucpData:
    periods: int
    demand: tuple[int, ...]
    types: tuple[UnitType, ...]
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "demand", tuple(int(d) for d in self.demand))
        object.__setattr__(self, "types", tuple(self.types))
        if len(self.demand) != self.periods:
            raise ValueError("demand length differs from the horizon")
        if any(d < 0 for d in self.demand):
            raise ValueError("demand must be non-negative")
        for ut in self.types:
            if not (1 <= ut.min_up <= self.periods and 1 <= ut.min_down <= self.periods):
                raise ValueError("min-up/min-down must lie in [1, T]")

    @property
    def n(self) -> int:
        return sum(ut.count for ut in self.types)

    def units_of_type(self) -> list[list[int]]:
        out, j = [], 0
        for ut in self.types:
            out.append(list(range(j, j + ut.count)))
            j += ut.count
        return out

    def unit_type(self) -> list[UnitType]:
        return [ut for ut in self.types for _ in range(ut.count)]

    def type_matrix(self, h: int) -> VarMatrix:
        units = self.units_of_type()[h]
        return VarMatrix([[x_var(t, j) for j in units] for t in range(self.periods)], FULL,
                         f"x^{h + 1}", symmetric=len(units) >= 2, role="units")

    @property
    def matrices(self) -> list[VarMatrix]:
        return [self.type_matrix(h) for h in range(len(self.types))]


def build_mucp(data: MucpData) -> MixedBinaryProgram:
    T = data.periods
    units = data.unit_type()
    n = len(units)
    variables = []
    for j, ut in enumerate(units):
        variables += [VariableDecl(x_var(t, j), BINARY, 0, 1, ut.fixed_cost) for t in range(T)]
    for j, ut in enumerate(units):
        variables += [VariableDecl(u_var(t, j), BINARY, 0, 1, ut.startup_cost) for t in range(T)]
    for j, ut in enumerate(units):
        variables += [VariableDecl(p_var(t, j), CONTINUOUS, 0, ut.p_max, ut.production_cost)
                      for t in range(T)]
    cons = []
    for t in range(T):
        cons.append(LinearConstraint(tuple((p_var(t, j), 1) for j in range(n)),
                                     data.demand[t], None, f"demand[{t + 1}]"))
    for j, ut in enumerate(units):
        for t in range(T):
            cons.append(LinearConstraint(((p_var(t, j), 1), (x_var(t, j), -ut.p_min)),
                                         0, None, f"pmin[{t + 1},{j + 1}]"))
            cons.append(LinearConstraint(((p_var(t, j), 1), (x_var(t, j), -ut.p_max)),
                                         None, 0, f"pmax[{t + 1},{j + 1}]"))
            link = [(u_var(t, j), 1), (x_var(t, j), -1)]
            if t > 0:
                link.append((x_var(t - 1, j), 1))
            cons.append(LinearConstraint(tuple(link), 0, None, f"startup[{t + 1},{j + 1}]"))
            up = [(u_var(s, j), 1) for s in range(max(0, t - ut.min_up + 1), t + 1)]
            cons.append(LinearConstraint(tuple(up) + ((x_var(t, j), -1),), None, 0,
                                         f"minup[{t + 1},{j + 1}]"))
            down = [(u_var(s, j), 1) for s in range(max(0, t - ut.min_down + 1), t + 1)]
            if t - ut.min_down >= 0:
                down.append((x_var(t - ut.min_down, j), 1))
            cons.append(LinearConstraint(tuple(down), None, 1, f"mindown[{t + 1},{j + 1}]"))
    return MixedBinaryProgram(variables, cons, MINIMIZE, data.matrices, data.name)


def gen_mucp(seed: int, periods: int, type_counts: Sequence[int]) -> MucpData:
    """Random MUCP with the given number of identical units per type.

    Per type: ``p_min ~ U[10,50]``, ``p_max = p_min + U[10,100]``,
    ``min_up, min_down ~ U[1, min(3,T)]``, start-up cost ``U[10,100]``, fixed
    cost ``U[1,20]``, production cost ``U[1,5]``. Demand per period is
    ``U[0, floor(0.8 * sum p_max)]``, so running every unit always is feasible.
    """
    if periods < 1:
        raise ValueError("need at least one period")
    if not type_counts or max(type_counts) < 2:
        raise ValueError("at least one unit type needs two or more units")
    gu, gd = stream(seed, _UNITS), stream(seed, _DEMAND)
    span = min(3, periods)
    types = []
    for count in type_counts:
        p_min = uniform_int(gu, 10, 50)
        p_max = p_min + uniform_int(gu, 10, 100)
        types.append(UnitType(int(count), p_min, p_max, uniform_int(gu, 1, span),
                              uniform_int(gu, 1, span), uniform_int(gu, 10, 100),
                              uniform_int(gu, 1, 20), uniform_int(gu, 1, 5)))
    cap = sum(ut.count * ut.p_max for ut in types)
    demand = tuple(uniform_int(gd, 0, (8 * cap) // 10) for _ in range(periods))
    if max(demand) > cap:
        raise AssertionError("generated demand exceeds total capacity")
    counts = "-".join(str(c) for c in type_counts)
    meta = {"generator": "mucp", "seed": int(seed), "T": periods, "type_counts": list(type_counts)}
    return MucpData(periods, demand, tuple(types), f"mucp_T{periods}_u{counts}_s{seed}", meta)


def to_json(data: MucpData) -> dict:
    out = {"format": "mucp", "version": 1, "name": data.name, "periods": data.periods,
           "demand": list(data.demand),
           "unit_types": [{"count": ut.count, "p_min": ut.p_min, "p_max": ut.p_max,
                           "min_up": ut.min_up, "min_down": ut.min_down,
                           "startup_cost": ut.startup_cost, "fixed_cost": ut.fixed_cost,
                           "production_cost": ut.production_cost} for ut in data.types]}
    if data.meta:
        out["meta"] = dict(data.meta)
    return out


def from_json(obj: dict) -> MucpData:
    if obj.get("format") != "mucp":
        raise ValueError("not an MUCP instance")
    types = tuple(UnitType(**ut) for ut in obj["unit_types"])
    return MucpData(obj["periods"], obj["demand"], types, obj.get("name", ""), obj.get("meta", {}))
