import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from _builders import A, B, C, D, S, T, chain4, diamond, make, simple_path_distances, to_networkx, all_shortest_edge_paths
from preserver.dag import build_local_graph, build_local_graphs
from preserver.errors import NonShortestWitness, UnreachablePair, ValidationError
from preserver.generators import gen_random
from preserver.graph import INF, Path, WeightedGraph, shortest_distances
from preserver.model import (PreserverSolution, classify_edges, savings_report, solution_from_paths,
                             trivial_upper_bound, verify_feasible)
from preserver.oracle import brute_force_optimum, enumerate_shortest_paths
from preserver.solve import solve


# shortest_distances

def test_single_edge_distances():
    g = WeightedGraph.from_edges(2, [(0, 1, 5)])
    assert shortest_distances(g, 0) == [0, 5]


def test_chain_distances():
    g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])
    assert shortest_distances(g, 0) == [0, 1, 2]


def test_unreachable_is_infinite():
    g = WeightedGraph.from_edges(3, [(0, 1, 1)])
    assert shortest_distances(g, 1) == [INF, 0, INF]


@pytest.mark.parametrize("seed", range(5))
def test_random_distances_match_exhaustive_paths(seed):
    inst = gen_random(10, 22, 1, (0, 6), seed)
    for source in range(10):
        ref = simple_path_distances(inst, source)
        got = shortest_distances(inst.graph, source)
        for v in range(10):
            assert got[v] == ref.get(v, INF)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.data())
def test_dijkstra_agrees_with_networkx(n, data):
    directed = data.draw(st.booleans())
    capacity = n * (n - 1) if directed else n * (n - 1) // 2
    m = data.draw(st.integers(n - 1, min(3 * n, capacity)))
    inst = gen_random(n, m, 1, (0, 9), data.draw(st.integers(0, 10**6)), directed=directed)
    G = to_networkx(inst)
    for s in range(n):
        ref = nx.single_source_dijkstra_path_length(G, s)
        got = shortest_distances(inst.graph, s)
        assert all(got[v] == ref.get(v, math.inf) for v in range(n))


def test_graph_validation():
    with pytest.raises(ValidationError):
        WeightedGraph.from_edges(2, [(0, 0, 1)])
    with pytest.raises(ValidationError):
        WeightedGraph.from_edges(2, [(0, 1, -1)])
    with pytest.raises(ValidationError):
        WeightedGraph.from_edges(2, [(0, 2, 1)])
    with pytest.raises(ValidationError):
        make(2, [(0, 1, 1)], [(0, 1)], epsilon=1.0)
    with pytest.raises(ValidationError):
        make(2, [(0, 1, 1)], [(1, 1)])


def test_duplicate_pairs_warn_and_collapse():
    with pytest.warns(UserWarning):
        inst = make(2, [(0, 1, 1)], [(0, 1), (0, 1)])
    assert inst.pairs == ((0, 1),)
    with pytest.warns(UserWarning):
        inst = make(2, [(0, 1, 1)], [(0, 1), (1, 0)], directed=False)
    assert len(inst.pairs) == 1


# build_local_graph

def test_local_graph_chain():
    dag = build_local_graph(make(3, [(0, 1, 1), (1, 2, 1)], [(0, 2)]), (0, 2))
    assert dag.edges == {0, 1} and dag.dist == 2


def test_local_graph_diamond():
    assert build_local_graph(diamond(), (S, T)).edges == {0, 1, 2, 3}


def test_local_graph_excludes_longer_detour():
    inst = make(3, [(0, 2, 3), (0, 1, 1), (1, 2, 1)], [(0, 2)])
    assert build_local_graph(inst, (0, 2)).edges == {1, 2}


def test_local_graph_unreachable():
    inst = make(3, [(0, 1, 1)], [(0, 2)])
    with pytest.raises(UnreachablePair):
        build_local_graph(inst, (0, 2))


@pytest.mark.parametrize("seed", range(6))
def test_local_graph_is_union_of_shortest_paths(seed):
    inst = gen_random(9, 20, 4, (1, 4), seed, directed=seed % 2 == 0)
    for (s, t), dag in zip(inst.pairs, build_local_graphs(inst)):
        union = frozenset().union(*all_shortest_edge_paths(inst, s, t))
        assert dag.edges == union


# trivial_upper_bound

def test_upper_bound_single_pair():
    assert trivial_upper_bound(make(2, [(0, 1, 5)], [(0, 1)])) == 5


def test_upper_bound_chain():
    assert trivial_upper_bound(chain4()) == 4


def test_upper_bound_unreachable():
    with pytest.raises(UnreachablePair):
        trivial_upper_bound(make(3, [(0, 1, 1)], [(0, 2)]))


@pytest.mark.parametrize("seed", range(5))
def test_upper_bound_matches_recomputed_distances(seed):
    inst = gen_random(12, 30, 6, (1, 9), seed)
    G = to_networkx(inst)
    assert trivial_upper_bound(inst) == sum(nx.dijkstra_path_length(G, s, t) for s, t in inst.pairs)


# classify_edges

def test_threshold_arithmetic_two_pairs_four_edges():
    profile = classify_edges(diamond())
    assert profile.threshold == pytest.approx(2 / 4 ** 1.0)
    assert profile.thick == {0, 1, 2, 3}
    assert not profile.thin


def test_edge_outside_every_local_graph_is_thin():
    inst = make(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)], [(0, 1)])
    profile = classify_edges(inst)
    assert profile.multiplicity[2] == 0 and 2 in profile.thin


@pytest.mark.parametrize("seed", range(4))
def test_multiplicity_matches_recount(seed):
    inst = gen_random(15, 40, 8, (1, 5), seed)
    profile = classify_edges(inst)
    counts = [0] * inst.m
    for (s, t), dag in zip(inst.pairs, build_local_graphs(inst)):
        union = set()
        for p in enumerate_shortest_paths(dag):
            union.update(p.edges)
        for e in union:
            counts[e] += 1
    assert list(profile.multiplicity) == counts
    threshold = len(inst.pairs) / inst.m ** (0.5 + inst.epsilon)
    assert profile.thick == {e for e in range(inst.m) if counts[e] >= threshold}


# verify_feasible

def test_whole_graph_is_feasible():
    inst = chain4()
    assert verify_feasible(inst, range(inst.m)).feasible


def test_empty_subgraph_violates_every_pair():
    inst = chain4()
    verdict = verify_feasible(inst, [])
    assert not verdict.feasible and verdict.violations == list(inst.pairs)


@pytest.mark.parametrize("seed", range(20))
def test_main_output_is_feasible(seed):
    inst = gen_random(12, 28, 5, (1, 6), seed, directed=seed % 3 != 0)
    sol, _ = solve(inst, "main", trials=8, seed=seed)
    assert verify_feasible(inst, sol.edges).feasible


# savings_report

def test_chain_savings_report():
    inst = chain4()
    paths = {(A, C): Path((A, B, C), (0, 1)), (B, D): Path((B, C, D), (1, 2))}
    report = savings_report(inst, solution_from_paths(inst, paths))
    assert (report.upper_bound, report.cost, report.objective) == (4, 3, 1)
    assert report.usage[1] == 2 and report.per_edge[1] == 1


def test_single_pair_objective_zero():
    inst = make(3, [(0, 1, 2), (1, 2, 3)], [(0, 2)])
    sol = solution_from_paths(inst, {(0, 2): Path((0, 1, 2), (0, 1))})
    assert savings_report(inst, sol).objective == 0


def test_non_shortest_witness_rejected():
    inst = make(3, [(0, 2, 5), (0, 1, 1), (1, 2, 1)], [(0, 2)])
    sol = PreserverSolution(frozenset({0, 1, 2}), {(0, 2): Path((0, 2), (0,))})
    with pytest.raises(NonShortestWitness):
        savings_report(inst, sol)


@pytest.mark.parametrize("seed", range(5))
def test_objective_formulas_agree_on_oracle_solution(seed):
    inst = gen_random(10, 24, 5, (1, 3), seed)
    sol = brute_force_optimum(inst).solution
    report = savings_report(inst, sol)
    assert report.objective == report.upper_bound - report.cost == sum(report.per_edge.values())
    c = inst.graph.weights
    assert report.objective == sum((report.usage[e] - 1) * c[e] for e in sol.edges)
