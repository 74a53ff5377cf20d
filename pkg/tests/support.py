"""Shared helpers for the test suite."""

from __future__ import annotations

from actsym.engine import BranchAndBound, SolverConfig
from actsym.instances import Problem
from actsym.oracle import Patterns, enumerate_orbits, orbits_without_survivor
from actsym.subsym import INEQ, configure, shi_subsymmetries


def survival_check(problem: Problem, setting: str):
    """(orbit count, orbits without a surviving member, activations seen)."""
    base = problem.build()
    patterns = Patterns(base)
    conf = configure(problem, setting)
    seen = {}

    def record(node, act, f0, f1):
        seen.setdefault((act.key, f0, f1), (act.target, f0, f1))

    bb = BranchAndBound(conf.program, SolverConfig(setting=setting), conf.handlers,
                        on_activation=record)
    survivors = {tuple(int(s[v]) for v in patterns.variables) for s in bb.enumerate_survivors()}
    groups = [m for m in base.matrices if m.symmetric and m.cols >= 2]
    point_groups = (lambda pt: shi_subsymmetries(problem, pt)) if setting == INEQ else None
    orbits = enumerate_orbits(base, groups, seen.values(), point_groups, patterns)
    missing = orbits_without_survivor(orbits, survivors)
    stray = survivors - set(patterns.values)
    assert not stray, f"survivors that are not feasible: {sorted(stray)[:3]}"
    return len(orbits), missing, len(seen)
