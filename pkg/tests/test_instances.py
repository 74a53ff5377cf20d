import json

import pytest
from hypothesis import given, strategies as st

from actsym.instances import (MKCS, MKP, MUCP, DimacsError, InstanceError, MkcsData, Problem,
                              dump, gen_mkp, gen_mucp, load, parse_dimacs, problem_from_json,
                              save, write_dimacs)
from actsym.instances.mkcs import Graph, mycielski, path, petersen
from actsym.instances.mkp import (FREE_PROFIT, ITEM_CLASSES, STRONGLY, SUBSET_SUM, WEAKLY,
                                  knapsack_capacity)
from actsym.instances.mucp import MucpData, UnitType
from actsym.oracle import optimum


def test_capacity_formula():
    assert knapsack_capacity([50, 30, 20], 2) == 25


def test_strongly_correlated_profits():
    data = gen_mkp(4, 12, 2, STRONGLY)
    assert all(p == w + 99 for w, p in zip(data.weights, data.profits))
    assert gen_mkp(4, 1, 1, STRONGLY).profits[0] == gen_mkp(4, 1, 1, STRONGLY).weights[0] + 99


@given(st.integers(0, 5000))
def test_weakly_correlated_bounds(seed):
    data = gen_mkp(seed, 10, 2, WEAKLY, "1/2", FREE_PROFIT)
    assert all(max(1, w - 99) <= p <= w + 99 for w, p in zip(data.weights, data.profits))


def weight_runs(weights):
    runs, last = [], None
    for w in weights:
        if runs and w == last:
            runs[-1] += 1
        else:
            runs.append(1)
        last = w
    return runs


@pytest.mark.parametrize("f,dmax", [("1/2", 10), ("1/4", 5), ("1/8", 2)])
def test_duplication_respects_symmetry_factor(f, dmax):
    # two independent draws can coincide and merge runs, so allow a rare excess
    over = 0
    for seed in range(200):
        data = gen_mkp(seed, 20, 3, SUBSET_SUM, f)
        assert len(data.weights) == 20 and len(set(data.capacities)) == 1
        over += max(weight_runs(data.weights)) > dmax
    assert over <= 4
    assert any(max(weight_runs(gen_mkp(s, 20, 3, SUBSET_SUM, f).weights)) == dmax
               for s in range(200))


@pytest.mark.parametrize("item_class", ITEM_CLASSES)
def test_generators_are_deterministic(item_class):
    a = dump(Problem(MKP, gen_mkp(9, 8, 3, item_class)))
    assert a == dump(Problem(MKP, gen_mkp(9, 8, 3, item_class)))
    assert a != dump(Problem(MKP, gen_mkp(10, 8, 3, item_class)))
    assert dump(Problem(MUCP, gen_mucp(2, 4, [3, 1]))) == dump(Problem(MUCP, gen_mucp(2, 4, [3, 1])))


def test_known_serialization():
    data = gen_mkp(0, 3, 2, "uncorrelated", "1/2", "equal")
    obj = json.loads(dump(Problem(MKP, data)))
    assert obj["format"] == "mkp"
    assert obj["capacities"] == [sum(obj["weights"]) // 4] * 2


def test_mucp_generator_has_symmetry():
    data = gen_mucp(0, 3, [1, 2])
    assert max(ut.count for ut in data.types) >= 2
    assert max(data.demand) <= sum(ut.count * ut.p_max for ut in data.types)
    with pytest.raises(ValueError):
        gen_mucp(0, 3, [1, 1])


def test_single_forced_unit_cost():
    unit = UnitType(1, 10, 30, 1, 1, startup_cost=40, fixed_cost=7, production_cost=2)
    data = MucpData(1, (25,), (unit,))
    assert optimum(Problem(MUCP, data).build()) == 40 + 7 + 2 * 25


def test_zero_demand_costs_nothing():
    unit = UnitType(2, 10, 30, 2, 1, 40, 7, 2)
    assert optimum(Problem(MUCP, MucpData(3, (0, 0, 0), (unit,))).build()) == 0


def test_dimacs_triangle():
    graph = parse_dimacs("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    assert graph.n == 3 and graph.edges == ((0, 1), (0, 2), (1, 2))


def test_dimacs_without_edges():
    assert parse_dimacs("c nothing here\np edge 4 0\n").edges == ()


@pytest.mark.parametrize("text,line", [
    ("p edge 3 1\ne 0 1\n", 2),
    ("p edge 3 1\ne 1 4\n", 2),
    ("e 1 2\np edge 3 1\n", 1),
    ("p edge 3 1\np edge 3 1\n", 2),
    ("p edge 3 1\nx 1 2\n", 2),
    ("p edge three 1\n", 1),
])
def test_dimacs_errors_carry_line_numbers(text, line):
    with pytest.raises(DimacsError) as err:
        parse_dimacs(text)
    assert err.value.line == line


def test_dimacs_missing_problem_line():
    with pytest.raises(DimacsError):
        parse_dimacs("c only a comment\n")


def test_dimacs_drops_loops_and_duplicates():
    graph = parse_dimacs("p edge 3 3\ne 1 2\ne 2 1\ne 3 3\n")
    assert graph.edges == ((0, 1),)
    assert len(graph.warnings) == 2


def test_myciel3_golden(data_dir):
    graph = parse_dimacs((data_dir / "myciel3.col").read_text())
    assert graph.n == 11 and len(graph.edges) == 20
    assert graph.comments[0] == "FILE: myciel3.col"
    adj = [set(a) for a in graph.adjacency()]
    assert not any(adj[u] & adj[v] for u, v in graph.edges)  # triangle free
    ours = mycielski(3)
    assert ours.name == "myciel3" and ours.n == 11 and len(ours.edges) == 20
    assert sorted(map(len, adj)) == sorted(len(a) for a in ours.adjacency())
    assert mycielski(4).n == 23 and len(mycielski(4).edges) == 71


def test_petersen_golden(data_dir):
    assert parse_dimacs((data_dir / "petersen.col").read_text()).edges == petersen().edges


def test_write_then_parse():
    graph = Graph(4, ((0, 1), (2, 3)), "", ("hello",))
    assert parse_dimacs(write_dimacs(graph)) == graph


def test_single_vertex_one_color():
    assert optimum(Problem(MKCS, MkcsData(Graph(1, ()), 1)).build()) == 1


def test_triangle_two_colors():
    triangle = Graph(3, ((0, 1), (1, 2), (0, 2)))
    assert optimum(Problem(MKCS, MkcsData(triangle, 2)).build()) == 2


@pytest.mark.parametrize("n", range(1, 6))
def test_two_colors_cover_a_path(n):
    assert optimum(Problem(MKCS, MkcsData(path(n), 2)).build()) == n


def test_file_round_trip(tmp_path, data_dir):
    for problem in (Problem(MKP, gen_mkp(1, 5, 2)), Problem(MUCP, gen_mucp(1, 3, [2])),
                    Problem(MKCS, MkcsData(petersen(), 3, "pet"))):
        file = tmp_path / f"{problem.name}.json"
        save(problem, file)
        again = load(file)
        assert dump(again) == dump(problem)
    col = load(data_dir / "triangle.col", k=2)
    assert col.name == "triangle_k2" and col.data.k == 2
    with pytest.raises(InstanceError):
        load(data_dir / "triangle.col")


def test_unknown_format():
    with pytest.raises(InstanceError):
        problem_from_json({"format": "tsp"})
    with pytest.raises(InstanceError):
        problem_from_json({"format": "mkcs"})
