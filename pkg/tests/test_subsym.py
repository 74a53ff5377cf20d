import pytest

from actsym.engine import NodeState, SolverConfig, solve
from actsym.instances import MKCS, MKP, MUCP, MkcsData, Problem, gen_mkp, gen_mucp
from actsym.instances.mkcs import Graph, path, petersen, x_var as color_var
from actsym.instances.mkp import mkp_from_lists, y_var
from actsym.instances.mucp import MucpData, UnitType, u_var, x_var
from actsym.model import FULL, PACKING, PARTITIONING
from actsym.oracle import check_activation, optimum
from actsym.subsym import (ACT, ACT_ALLPAIRS, ACT_CONSEC, CONSECUTIVE, INEQ, NO_SYM, ORBITOPE,
                           MkcsActivationHandler, MkpActivationHandler, MucpActivationHandler,
                           UnsupportedSetting, configure, mkp_shis, mucp_shis, settings_for)


def cells(act):
    return act.target.row_set, act.target.col_list, act.kind


# -- knapsacks ------------------------------------------------------------------------

def test_equal_capacities_activate_everything():
    data = mkp_from_lists([3, 3], [1, 1], [5, 5])
    acts = MkpActivationHandler(data).activations(NodeState(0))
    assert [cells(a) for a in acts] == [((0, 1), (0, 1), PACKING)]


def test_remaining_capacities_split_after_a_fixed_row():
    data = mkp_from_lists([2, 3], [1, 1], [5, 5])
    node = NodeState(0, fixed_zero={y_var(0, 1)}, fixed_one={y_var(0, 0)})
    acts = MkpActivationHandler(data).activations(node)
    assert [cells(a) for a in acts] == [((0, 1), (0, 1), PACKING)]


def test_equal_remaining_capacity_after_prefix():
    data = mkp_from_lists([2, 3, 1], [1, 1, 1], [5, 3, 5])
    node = NodeState(0, fixed_zero={y_var(0, 0), y_var(0, 2)}, fixed_one={y_var(0, 1)})
    acts = MkpActivationHandler(data).activations(node)
    # row 0: knapsacks 0 and 2 share capacity 5; row 1: all three are at 5, 1, 5
    assert [cells(a) for a in acts] == [((0, 1, 2), (0, 2), PACKING),
                                        ((1, 2), (0, 2), PACKING)]


def test_distinct_capacities_give_nothing():
    data = mkp_from_lists([3, 3], [1, 1], [5, 7])
    assert MkpActivationHandler(data).activations(NodeState(0)) == []


def test_partitioning_variant():
    data = mkp_from_lists([3, 3], [1, 1], [5, 5])
    acts = MkpActivationHandler(data, partitioning_variant=True).activations(NodeState(0))
    assert acts[0].kind == PARTITIONING


def shi_named(cons, name):
    return next(c for c in cons if c.name == name)


def test_first_row_shi_has_no_slack():
    variables, cons = mkp_shis(mkp_from_lists([2, 2], [1, 1], [6, 6]))
    bounds = {v.id: v.upper for v in variables}
    assert bounds["alpha+[1,1]"] == 6
    alpha = shi_named(cons, "shi_alpha[1,1]")
    assert dict(alpha.terms) == {"alpha+[1,1]": 1, "alpha-[1,1]": -1}
    assert alpha.lower == alpha.upper == 0
    shi = shi_named(cons, "shi[1,1]")
    assert dict(shi.terms) == {y_var(0, 1): 1, "z+[1,1]": -1, "z-[1,1]": -1, y_var(0, 0): -1}


def test_big_m_grows_with_the_prefix():
    variables, _ = mkp_shis(mkp_from_lists([4, 1], [1, 1], [6, 6]))
    assert {v.id: v.upper for v in variables}["alpha-[2,1]"] == 10


@pytest.mark.parametrize("seed", range(8))
def test_mkp_shis_keep_optimum(seed):
    data = gen_mkp(seed, 3, 2)
    base = Problem(MKP, data).build()
    variables, cons = mkp_shis(data)
    assert optimum(base.extend(variables, cons)) == optimum(base)


# -- unit commitment ------------------------------------------------------------------

def mucp(min_up, min_down, periods=4, count=2):
    unit = UnitType(count, 10, 20, min_up, min_down, 5, 1, 1)
    return MucpData(periods, (0,) * periods, (unit,), "t")


def test_units_ready_to_start():
    node = NodeState(0, fixed_zero={x_var(t, j) for t in (0, 1) for j in (0, 1)})
    acts = MucpActivationHandler(mucp(min_up=3, min_down=2)).activations(node)
    assert [cells(a) for a in acts] == [((2, 3), (0, 1), FULL)]


def test_one_ready_unit_is_not_enough():
    node = NodeState(0, fixed_zero={x_var(0, 0), x_var(1, 0), x_var(0, 1)})
    assert MucpActivationHandler(mucp(min_up=3, min_down=2)).activations(node) == []


def test_units_ready_to_shut_down():
    node = NodeState(0, fixed_one={x_var(t, j) for t in (0, 1) for j in (0, 1)})
    handler = MucpActivationHandler(mucp(min_up=2, min_down=3))
    assert [cells(a) for a in handler.activations(node)] == [((2, 3), (0, 1), FULL)]
    assert MucpActivationHandler(mucp(2, 3), shutdown=False).activations(node) == []


def startup_shis(data, strengthened=True):
    return [c for c in mucp_shis(data, strengthened) if c.name.startswith("shi_start")]


def test_strengthened_startup_instance():
    data = mucp(min_up=1, min_down=2, periods=3)
    (con,) = startup_shis(data)
    assert con.name == "shi_start[3,1]"
    assert dict(con.terms) == {u_var(2, 1): 1, x_var(0, 0): -1, x_var(2, 0): -1, u_var(1, 0): -1}
    assert con.upper == 0


def test_empty_middle_sum():
    data = mucp(min_up=1, min_down=1, periods=2)
    (con,) = startup_shis(data)
    assert dict(con.terms) == {u_var(1, 1): 1, x_var(0, 0): -1, x_var(1, 0): -1}


def test_plain_startup_instance():
    data = mucp(min_up=1, min_down=1, periods=2)
    (con,) = startup_shis(data, strengthened=False)
    assert dict(con.terms) == {x_var(1, 1): 1, x_var(1, 0): -1, x_var(0, 0): -1, x_var(0, 1): -1}


def test_only_consecutive_pairs():
    data = mucp(min_up=1, min_down=1, periods=2, count=3)
    assert {c.name for c in startup_shis(data)} == {"shi_start[2,1]", "shi_start[2,2]"}


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("strengthened", [True, False])
def test_mucp_shis_keep_optimum(seed, strengthened):
    data = gen_mucp(seed, 3, [2])
    base = Problem(MUCP, data).build()
    assert optimum(base.extend(constraints=mucp_shis(data, strengthened))) == optimum(base)


# -- coloring -------------------------------------------------------------------------

def coloring(graph, k=2):
    return MkcsData(graph, k, graph.name)


def test_blocked_middle_vertex_splits_the_path():
    node = NodeState(0, fixed_zero={color_var(1, 0), color_var(1, 1)})
    assert MkcsActivationHandler(coloring(path(3))).activations(node) == []


def test_connected_path_is_one_component():
    acts = MkcsActivationHandler(coloring(path(3))).activations(NodeState(0))
    assert [cells(a) for a in acts] == [((0, 1, 2), (0, 1), PACKING)]


def test_each_component_gets_its_own_activation():
    graph = Graph(4, ((0, 1), (2, 3)))
    acts = MkcsActivationHandler(coloring(graph)).activations(NodeState(0))
    assert sorted(cells(a) for a in acts) == [((0, 1), (0, 1), PACKING),
                                              ((2, 3), (0, 1), PACKING)]


def test_pair_modes():
    data = coloring(path(3), k=3)
    assert len(MkcsActivationHandler(data, CONSECUTIVE).activations(NodeState(0))) == 2
    assert len(MkcsActivationHandler(data).activations(NodeState(0))) == 3
    with pytest.raises(ValueError):
        MkcsActivationHandler(data, "every")


def test_mkcs_activation_is_sound_at_a_node():
    problem = Problem(MKCS, coloring(path(4), 3))
    node = NodeState(0, fixed_one={color_var(0, 0)}, fixed_zero={color_var(2, 0), color_var(2, 1)})
    for act in MkcsActivationHandler(problem.data).activations(node):
        check_activation(problem.build(), node, act)


# -- settings -------------------------------------------------------------------------

def test_settings_per_family():
    assert settings_for(MKP) == (NO_SYM, ORBITOPE, INEQ, ACT)
    assert settings_for(MKCS) == (NO_SYM, ORBITOPE, ACT_CONSEC, ACT_ALLPAIRS)


def test_ineq_is_not_defined_for_coloring():
    with pytest.raises(UnsupportedSetting):
        configure(Problem(MKCS, coloring(path(3))), INEQ)
    with pytest.raises(UnsupportedSetting):
        configure(Problem(MKP, mkp_from_lists([1], [1], [1])), "default")


def test_act_on_coloring_means_all_pairs():
    problem = Problem(MKCS, coloring(petersen(), 3))
    conf = configure(problem, ACT)
    assert any(isinstance(h, MkcsActivationHandler) and h.pairs == [(0, 1), (0, 2), (1, 2)]
               for h in conf.handlers)
    assert solve(conf.program, SolverConfig(setting=ACT), conf.handlers).objective == 10
