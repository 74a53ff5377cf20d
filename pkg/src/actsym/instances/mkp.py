"""Multiple knapsack instances: generator, builder and file format."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..model import (BINARY, FULL, MAXIMIZE, PACKING, LinearConstraint,
                     MixedBinaryProgram, VariableDecl, VarMatrix)
from .rng import stream, uniform_int

UNCORRELATED = "uncorrelated"
WEAKLY = "weakly"
STRONGLY = "strongly"
SUBSET_SUM = "subset_sum"
ITEM_CLASSES = (UNCORRELATED, WEAKLY, STRONGLY, SUBSET_SUM)

EQUAL_PROFIT = "equal"
FREE_PROFIT = "free"

WEIGHT_MIN = 10
WEIGHT_MAX = 1000
SPREAD = (WEIGHT_MAX - WEIGHT_MIN) // 10  # 99

SYMMETRY_FACTORS = (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 8))

# stream numbers, see rng.py
_WEIGHTS, _DUPLICATION, _PROFITS = 0, 1, 2


def y_var(i: int, j: int) -> str:
    return f"y[{i + 1},{j + 1}]"


@dataclass(frozen=True)
class MkpData:
    weights: tuple[int, ...]
    profits: tuple[int, ...]
    capacities: tuple[int, ...]
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "profits", tuple(int(p) for p in self.profits))
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))
        if len(self.weights) != len(self.profits):
            raise ValueError("weights and profits differ in length")
        if not self.weights or not self.capacities:
            raise ValueError("need at least one item and one knapsack")
        if min(self.weights) < 1:
            raise ValueError("weights must be positive")

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.capacities)

    @property
    def matrix(self) -> VarMatrix:
        """Item x knapsack assignment matrix."""
        return VarMatrix([[y_var(i, j) for j in range(self.n)] for i in range(self.m)],
                         PACKING, "knapsacks", symmetric=len(set(self.capacities)) == 1,
                         role="knapsacks")

    def item_groups(self) -> list[list[int]]:
        """Maximal sets (size >= 2) of items with equal weight and profit."""
        groups: dict[tuple[int, int], list[int]] = {}
        for i, key in enumerate(zip(self.weights, self.profits)):
            groups.setdefault(key, []).append(i)
        return [g for g in groups.values() if len(g) >= 2]

    def capacity_classes(self) -> list[list[int]]:
        classes: dict[int, list[int]] = {}
        for j, c in enumerate(self.capacities):
            classes.setdefault(c, []).append(j)
        return [g for g in classes.values() if len(g) >= 2]


def _profit(gen, item_class: str, w: int) -> int:
    if item_class == UNCORRELATED:
        return uniform_int(gen, WEIGHT_MIN, WEIGHT_MAX)
    if item_class == WEAKLY:
        return uniform_int(gen, max(1, w - SPREAD), w + SPREAD)
    if item_class == STRONGLY:
        return w + SPREAD
    if item_class == SUBSET_SUM:
        return w
    raise ValueError(f"unknown item class {item_class!r}")


def knapsack_capacity(weights: Sequence[int], n: int) -> int:
    """Common capacity ``floor(sum(w) / (2 n))``: about half of all items fit."""
    return sum(weights) // (2 * n)


def gen_mkp(seed: int, m: int, n: int, item_class: str = UNCORRELATED,
            f: Fraction | str | float = Fraction(1, 2),
            profit_mode: str = EQUAL_PROFIT) -> MkpData:
    """Random MKP with groups of equal-weight items.

    Weights are uniform in [10, 1000]; each drawn weight is repeated ``d``
    times with ``d`` uniform in [1, floor(f*m)] (the last group is truncated
    so exactly ``m`` items exist). Capacities are all
    ``floor(sum(w) / (2 n))``.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if item_class not in ITEM_CLASSES:
        raise ValueError(f"unknown item class {item_class!r}")
    if profit_mode not in (EQUAL_PROFIT, FREE_PROFIT):
        raise ValueError(f"unknown profit mode {profit_mode!r}")
    f = Fraction(f).limit_denominator(1000) if not isinstance(f, Fraction) else f
    if f <= 0 or f > 1:
        raise ValueError("symmetry factor must lie in (0, 1]")
    gw, gd, gp = stream(seed, _WEIGHTS), stream(seed, _DUPLICATION), stream(seed, _PROFITS)
    dmax = max(1, math.floor(f * m))
    weights: list[int] = []
    profits: list[int] = []
    while len(weights) < m:
        w = uniform_int(gw, WEIGHT_MIN, WEIGHT_MAX)
        d = min(uniform_int(gd, 1, dmax), m - len(weights))
        if profit_mode == EQUAL_PROFIT:
            p = _profit(gp, item_class, w)
            group = [p] * d
        else:
            group = [_profit(gp, item_class, w) for _ in range(d)]
        weights.extend([w] * d)
        profits.extend(group)
    cap = knapsack_capacity(weights, n)
    name = f"mkp_{item_class}_{profit_mode}_m{m}_n{n}_f{f.numerator}-{f.denominator}_s{seed}"
    meta = {"generator": "mkp", "seed": int(seed), "m": m, "n": n, "item_class": item_class,
            "f": f"{f.numerator}/{f.denominator}", "profit_mode": profit_mode}
    return MkpData(tuple(weights), tuple(profits), (cap,) * n, name, meta)


def build_mkp(data: MkpData) -> MixedBinaryProgram:
    """Assignment formulation with knapsack and identical-item matrices.

    Variables are declared knapsack by knapsack (columns outer, items inner),
    which is the order that makes the knapsack orbitope and the item
    orbitopes select a common representative.
    """
    m, n = data.m, data.n
    variables = [VariableDecl(y_var(i, j), BINARY, 0, 1, data.profits[i])
                 for j in range(n) for i in range(m)]
    constraints = []
    for j in range(n):
        constraints.append(LinearConstraint(
            tuple((y_var(i, j), data.weights[i]) for i in range(m)),
            None, data.capacities[j], f"capacity[{j + 1}]"))
    for i in range(m):
        constraints.append(LinearConstraint(
            tuple((y_var(i, j), 1) for j in range(n)), None, 1, f"assign[{i + 1}]"))
    matrices = [data.matrix]
    if len(set(data.capacities)) > 1:
        for cls in data.capacity_classes():
            matrices.append(VarMatrix([[y_var(i, j) for j in cls] for i in range(m)], PACKING,
                                      f"knapsacks[c={data.capacities[cls[0]]}]",
                                      symmetric=True, role="knapsack-class"))
    for g in data.item_groups():
        matrices.append(VarMatrix([[y_var(i, j) for i in g] for j in range(n)], FULL,
                                  f"items[{g[0] + 1}..{g[-1] + 1}]", symmetric=True,
                                  role="items"))
    return MixedBinaryProgram(variables, constraints, MAXIMIZE, matrices, data.name)


def to_json(data: MkpData) -> dict:
    out = {"format": "mkp", "version": 1, "name": data.name,
           "weights": list(data.weights), "profits": list(data.profits),
           "capacities": list(data.capacities)}
    if data.meta:
        out["meta"] = dict(data.meta)
    return out


def from_json(obj: dict) -> MkpData:
    if obj.get("format") != "mkp":
        raise ValueError("not an MKP instance")
    return MkpData(obj["weights"], obj["profits"], obj["capacities"], obj.get("name", ""),
                   obj.get("meta", {}))


def mkp_from_lists(weights: Sequence[int], profits: Sequence[int],
                   capacities: Sequence[int], name: str = "") -> MkpData:
    return MkpData(tuple(weights), tuple(profits), tuple(capacities), name)
