"""Lexicographic comparison and orbitopal fixing.

``propagate_orbitope`` computes, for a grid of cell domains, every cell that
takes the same value in all completions whose columns are lexicographically
non-increasing and whose rows obey the orbitope kind (full: no rule, packing:
at most one 1, partitioning: exactly one 1).

The propagation is a dynamic program over rows. Its state records which
adjacent column pairs are still tied (equal on all rows so far); a tied pair
must satisfy ``x[r, c] >= x[r, c + 1]`` and stays tied only while equal. A
forward pass collects reachable states, a backward pass keeps those that can
be completed, and the surviving transitions give the attainable values of
each cell. The result is exactly the forced-cell set, not an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .model import FULL, ORBITOPE_KINDS, PACKING, PARTITIONING

GREATER = "greater"
EQUAL = "equal"
LESS = "less"

# cell domains
ONLY0 = 0
ONLY1 = 1
FREE = None


def lex_cmp(a: Sequence[int], b: Sequence[int]) -> str:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    for x, y in zip(a, b):
        if x > y:
            return GREATER
        if x < y:
            return LESS
    return EQUAL


def columns_sorted(matrix: Sequence[Sequence[int]]) -> bool:
    """True if the columns of a 0/1 matrix are lexicographically non-increasing."""
    if not matrix:
        return True
    cols = list(zip(*matrix))
    return all(lex_cmp(cols[c], cols[c + 1]) != LESS for c in range(len(cols) - 1))


@dataclass
class FixDelta:
    fixings: list[tuple[int, int, int]] = field(default_factory=list)
    infeasible: bool = False

    def __bool__(self):
        return self.infeasible or bool(self.fixings)


def _row_transitions(dom_row, n, state, kind):
    """All (row_bits, next_state) pairs admissible from ``state``.

    Bit ``c`` of ``row_bits`` is the value in column ``c``; bit ``c`` of a
    state marks the pair (c, c+1) as tied.
    """
    out = []
    need_one = kind == PARTITIONING
    at_most_one = kind in (PACKING, PARTITIONING)

    def rec(c, bits, ones, nxt, prev):
        if c == n:
            if need_one and ones != 1:
                return
            out.append((bits, nxt))
            return
        d = dom_row[c]
        for v in (1, 0):
            if d is not None and d != v:
                continue
            if v and at_most_one and ones:
                continue
            tied = c > 0 and (state >> (c - 1)) & 1
            if tied and v > prev:
                continue
            nb = nxt
            if tied and v == prev:
                nb |= 1 << (c - 1)
            rec(c + 1, bits | (v << c), ones + v, nb, v)

    rec(0, 0, 0, 0, 1)
    return out


def propagate_orbitope(grid: Sequence[Sequence[int | None]], kind: str = FULL) -> FixDelta:
    """Maximal fixings for the orbitope of ``kind`` under the cell domains in ``grid``.

    ``grid[r][c]`` is 0, 1 or None (free). Returned fixings only cover free
    cells; ``infeasible`` is set when no admissible completion exists.
    """
    if kind not in ORBITOPE_KINDS:
        raise ValueError(f"unknown orbitope kind {kind!r}")
    m = len(grid)
    n = len(grid[0]) if m else 0
    if m == 0 or n == 0:
        return FixDelta()
    full_state = (1 << (n - 1)) - 1
    mask_all = (1 << n) - 1

    # forward: reachable states and their transitions
    trans: list[dict[int, list]] = []
    layer = {full_state}
    for r in range(m):
        row = {s: _row_transitions(grid[r], n, s, kind) for s in layer}
        trans.append(row)
        layer = {ns for t in row.values() for _, ns in t}
        if not layer:
            return FixDelta(infeasible=True)

    # backward: states from which the remaining rows can be completed
    alive: list[set | None] = [None] * (m + 1)
    for r in range(m - 1, -1, -1):
        nxt = alive[r + 1]
        alive[r] = {s for s, t in trans[r].items()
                    if any(nxt is None or ns in nxt for _, ns in t)}
    if full_state not in alive[0]:
        return FixDelta(infeasible=True)

    fixings = []
    reach = {full_state}
    for r in range(m):
        nxt = alive[r + 1]
        ones = zeros = 0
        new_reach = set()
        for s in reach:
            for bits, ns in trans[r][s]:
                if nxt is None or ns in nxt:
                    ones |= bits
                    zeros |= mask_all & ~bits
                    new_reach.add(ns)
        reach = new_reach
        for c in range(n):
            if grid[r][c] is not None:
                continue
            o = (ones >> c) & 1
            z = (zeros >> c) & 1
            if o and not z:
                fixings.append((r, c, 1))
            elif z and not o:
                fixings.append((r, c, 0))
    return FixDelta(fixings)
