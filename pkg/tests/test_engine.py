from fractions import Fraction

import pytest

from actsym.engine import (DEPTH_FIRST, INFEASIBLE, NODE_LIMIT, OPTIMAL, TIME_LIMIT,
                           BranchAndBound, NodeState, SolverConfig, StaticOrbitope, branch,
                           propagate, solve)
from actsym.instances import MKCS, MKP, MUCP, MkcsData, Problem, gen_mkp, gen_mucp
from actsym.instances.mkcs import Graph
from actsym.instances.mkp import mkp_from_lists, y_var
from actsym.lp import LpResult
from actsym.model import (BINARY, FULL, LinearConstraint, MixedBinaryProgram, VariableDecl)
from actsym.oracle import optimum
from actsym.subsym import configure, settings_for


def mkp(weights, profits, caps):
    return Problem(MKP, mkp_from_lists(weights, profits, caps)).build()


def knapsack_orbitope(prog):
    return StaticOrbitope(next(m for m in prog.matrices if m.role == "knapsacks"), FULL)


def test_single_overweight_item():
    report = solve(mkp([5], [7], [4]))
    assert report.status == OPTIMAL and report.objective == 0


def test_two_items_one_knapsack():
    report = solve(mkp([3, 4], [3, 4], [6]))
    assert report.status == OPTIMAL and report.objective == 4
    assert report.incumbent[y_var(1, 0)] == 1


def test_triangle_two_colors():
    triangle = Graph(3, ((0, 1), (0, 2), (1, 2)))
    report = solve(Problem(MKCS, MkcsData(triangle, 2)).build())
    assert report.objective == 2


def test_infeasible_program():
    x = VariableDecl("x", BINARY, 0, 1, 1)
    prog = MixedBinaryProgram((x,), (LinearConstraint((("x", 2),), 1, 1),))
    assert solve(prog).status == INFEASIBLE


def test_propagation_fixpoint_without_fixings():
    prog = mkp([1, 1], [1, 1], [5, 5])
    res = propagate(NodeState(0), prog)
    assert res.fixings == {} and not res.infeasible and res.rounds == 1


def test_orbitope_fixes_second_knapsack():
    prog = mkp([1, 1], [1, 1], [5, 5])
    node = NodeState(0, fixed_zero={y_var(0, 0)})
    res = propagate(node, prog, [knapsack_orbitope(prog)])
    assert not res.infeasible
    assert res.fixings == {y_var(0, 1): 0}


def test_orbitope_detects_contradiction():
    prog = mkp([1, 1], [1, 1], [5, 5])
    node = NodeState(0, fixed_zero={y_var(0, 0)}, fixed_one={y_var(0, 1)})
    assert propagate(node, prog, [knapsack_orbitope(prog)]).infeasible


def branching_program(k):
    return MixedBinaryProgram(tuple(VariableDecl(f"b{j}", BINARY) for j in range(k)))


@pytest.mark.parametrize("values,expected", [
    ((0.5, 0.9), "b0"),
    ((0.7, 0.3), "b0"),
    ((0.2, 0.5, 0.5), "b1"),
])
def test_most_fractional_branching(values, expected):
    prog = branching_program(len(values))
    lp = LpResult(OPTIMAL, 0.0, {f"b{j}": v for j, v in enumerate(values)})
    down, up = branch(NodeState(0), lp, prog)
    assert down.fixed_zero == {expected} and up.fixed_one == {expected}
    assert down.depth == up.depth == 1


def test_branch_needs_a_fractional_value():
    with pytest.raises(ValueError):
        branch(NodeState(0), LpResult(OPTIMAL, 0.0, {"b0": 1.0}), branching_program(1))


@pytest.mark.parametrize("seed", range(6))
def test_depth_first_agrees(seed):
    problem = Problem(MKP, gen_mkp(seed, 5, 2))
    prog = problem.build()
    best = solve(prog).objective
    assert solve(prog, SolverConfig(node_selection=DEPTH_FIRST)).objective == best


def test_time_and_node_limits():
    prog = Problem(MKP, gen_mkp(0, 20, 4)).build()
    assert solve(prog, SolverConfig(time_limit_s=0.0)).status == TIME_LIMIT
    report = solve(prog, SolverConfig(node_limit=3))
    assert report.status == NODE_LIMIT and report.nodes == 3


@pytest.mark.parametrize("seed,periods,counts", [(0, 3, [2]), (1, 2, [2, 1]), (4, 3, [3])])
def test_mucp_settings_match_oracle(seed, periods, counts):
    problem = Problem(MUCP, gen_mucp(seed, periods, counts))
    expected = optimum(problem.build())
    for setting in settings_for(MUCP):
        conf = configure(problem, setting)
        report = solve(conf.program, SolverConfig(setting=setting), conf.handlers)
        assert report.objective == expected, setting
        assert isinstance(report.objective, Fraction)


def test_verification_mode_runs_the_checker():
    problem = Problem(MKP, mkp_from_lists([2, 2, 1], [2, 2, 1], [3, 3]))
    conf = configure(problem, "act")
    bb = BranchAndBound(conf.program, SolverConfig(verify_activations=True), conf.handlers)
    report = bb.solve()
    assert report.objective == 5
    assert bb._verify.checked > 0


def test_survivors_cover_optimum():
    problem = Problem(MKP, mkp_from_lists([2, 2, 1], [2, 2, 1], [3, 3]))
    conf = configure(problem, "act")
    plain = BranchAndBound(problem.build()).enumerate_survivors()
    reduced = BranchAndBound(conf.program, None, conf.handlers).enumerate_survivors()
    assert len(reduced) < len(plain)
    value = max(sum(a[y_var(i, j)] * w for i, w in enumerate((2, 2, 1)) for j in range(2))
                for a in reduced)
    assert value == 5


def test_repeated_solves_are_identical():
    problem = Problem(MKP, gen_mkp(5, 12, 3))
    conf = configure(problem, "act")
    a = solve(conf.program, SolverConfig(setting="act"), conf.handlers)
    b = solve(conf.program, SolverConfig(setting="act"), conf.handlers)
    assert (a.nodes, a.objective, a.incumbent) == (b.nodes, b.objective, b.incumbent)
