import math

import pytest

from _builders import S, T, DA, DB, chain4, diamond, make
from preserver.dag import build_local_graphs
from preserver.errors import DimensionMismatch, NonConservingInput, ValidationError
from preserver.generators import gen_random
from preserver.lp import (FractionalSolution, build_restricted_lp, conservation_residual, edge_savings,
                          expected_savings, mix_solutions, monte_carlo_savings, path_decompose, prepare_rounding,
                          run_algorithm2, solve_lp, uniform_extension_solution)
from preserver.model import ThicknessProfile, classify_edges, verify_feasible
from preserver.oracle import brute_force_optimum, classify_dominance, classify_lightness


def hand_profile(inst, thin):
    dags = build_local_graphs(inst)
    thin = frozenset(thin)
    mult = tuple(sum(e in d.edges for d in dags) for e in range(inst.m))
    b = tuple(sum(e in thin for e in d.edges) for d in dags)
    return ThicknessProfile(mult, 0.0, frozenset(range(inst.m)) - thin, thin, b, inst.m), dags


def thin_rich(seed, n=10, m=20, p=12):
    """Many pairs on few edges with small epsilon, so thin edges and light pairs both occur."""
    return gen_random(n, m, p, (1, 3), seed, epsilon=0.1)


def zero_solution(like: FractionalSolution) -> FractionalSolution:
    return FractionalSolution({}, {}, 0.0, like.npairs, like.qualifying)


# build_restricted_lp / solve_lp

def test_all_thick_gives_empty_objective():
    inst = chain4()
    lp = build_restricted_lp(inst)
    assert not lp.qualifying and not lp.y_columns and not lp.objective.any()
    assert solve_lp(lp).objective == 0


def test_all_thin_diamond_lp_optimum():
    inst = diamond()
    profile, dags = hand_profile(inst, {0, 1, 2, 3})
    lp = build_restricted_lp(inst, profile, dags)
    assert lp.qualifying == {1}
    oracle = brute_force_optimum(inst, objective_edges=lp.qualifying)
    assert oracle.objective == 1
    assert solve_lp(lp).objective == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_objective_coefficients_audit(seed):
    inst = thin_rich(seed)
    lp = build_restricted_lp(inst)
    c = inst.graph.weights
    assert len(lp.y_columns) == len(lp.qualifying)
    positive = {lp.columns[k][1] for k in range(len(lp.columns)) if lp.objective[k] > 0}
    assert positive == {e for e in lp.qualifying if c[e] > 0}


def test_single_pair_single_path():
    inst = make(3, [(0, 1, 2), (1, 2, 3)], [(0, 2)])
    sol = solve_lp(build_restricted_lp(inst))
    assert sol.x == {(0, 0): 1.0, (0, 1): 1.0} and sol.objective == 0


def test_lp_requires_directed_input():
    with pytest.raises(ValidationError):
        build_restricted_lp(make(2, [(0, 1, 1)], [(0, 1)], directed=False))


@pytest.mark.parametrize("seed", range(8))
def test_lp_dominates_integral_selections(seed):
    inst = thin_rich(seed)
    lp = build_restricted_lp(inst)
    integral = brute_force_optimum(inst, objective_edges=lp.qualifying).objective
    assert solve_lp(lp).objective >= integral - 1e-6


# uniform_extension_solution

def test_two_thin_edges_split_evenly():
    inst = make(5, [(S, DA, 1), (DA, T, 1), (S, DB, 1), (DB, T, 1), (T, 4, 1)], [(S, T)])
    profile, dags = hand_profile(inst, {0, 2})
    assert profile.is_light_pair(0)
    _, flow = uniform_extension_solution(inst, profile, dags)
    assert sorted((p.nodes, f) for p, f in flow.flows[0]) == [((S, DA, T), 0.5), ((S, DB, T), 0.5)]


def test_heavy_pair_routes_one_path():
    inst = diamond(((S, T),))
    profile, dags = hand_profile(inst, {0, 1, 2, 3})
    assert not profile.is_light_pair(0)
    xone, flow = uniform_extension_solution(inst, profile, dags)
    assert len(flow.flows[0]) == 1 and flow.flows[0][0][1] == 1.0
    assert set(xone.x.values()) == {1.0}


@pytest.mark.parametrize("seed", range(10))
def test_uniform_solution_conserves_flow(seed):
    inst = thin_rich(seed)
    dags = build_local_graphs(inst)
    xone, _ = uniform_extension_solution(inst, classify_edges(inst, dags), dags)
    assert conservation_residual(xone.x, dags) < 1e-9


# mix_solutions

def test_mix_is_idempotent():
    inst = thin_rich(1)
    state = prepare_rounding(inst)
    mixed = mix_solutions(state.xstar, state.xstar, inst.graph.weights)
    assert all(mixed.x[k] == pytest.approx(v) for k, v in state.xstar.x.items())
    assert mixed.objective == pytest.approx(state.xstar.objective)


@pytest.mark.parametrize("seed", range(4))
def test_mix_with_zero_halves_and_keeps_floor(seed):
    inst = thin_rich(seed)
    state = prepare_rounding(inst)
    mixed = mix_solutions(zero_solution(state.xone), state.xone, inst.graph.weights)
    assert all(mixed.x[k] == pytest.approx(v / 2) for k, v in state.xone.x.items())
    for e in state.lp.qualifying:
        assert mixed.y[e] >= 1 / (2 * math.sqrt(inst.m)) - 1e-9


def test_mix_dimension_mismatch():
    a = FractionalSolution({}, {}, 0.0, 2, frozenset())
    b = FractionalSolution({}, {}, 0.0, 3, frozenset())
    with pytest.raises(DimensionMismatch):
        mix_solutions(a, b, [])


@pytest.mark.parametrize("seed", range(10))
def test_mixing_inequalities_edge_by_edge(seed):
    inst = thin_rich(seed)
    state = prepare_rounding(inst)
    c = inst.graph.weights
    star = edge_savings(state.xstar.x, c, state.lp.qualifying)
    two = edge_savings(state.xtwo.x, c, state.lp.qualifying)
    for e in state.lp.qualifying:
        assert two[e] >= 0.5 * star[e] - 1e-6
        assert state.xtwo.y[e] >= 1 / (2 * math.sqrt(inst.m)) - 1e-9


# path_decompose

def test_integral_solution_gives_one_path_per_pair():
    inst = chain4()
    dags = build_local_graphs(inst)
    x = FractionalSolution({(0, 0): 1.0, (0, 1): 1.0, (1, 1): 1.0, (1, 2): 1.0}, {}, 0.0, 2, frozenset())
    flow = path_decompose(x, dags)
    assert [[(p.edges, f) for p, f in paths] for paths in flow.flows] == [[((0, 1), 1.0)], [((1, 2), 1.0)]]


def test_half_half_diamond():
    inst = diamond(((S, T),))
    dags = build_local_graphs(inst)
    x = FractionalSolution({(0, e): 0.5 for e in range(4)}, {}, 0.0, 1, frozenset())
    flow = path_decompose(x, dags)
    assert sorted((p.nodes, f) for p, f in flow.flows[0]) == [((S, DA, T), 0.5), ((S, DB, T), 0.5)]


def test_broken_conservation_rejected():
    inst = diamond(((S, T),))
    x = FractionalSolution({(0, 0): 0.5, (0, 1): 0.5}, {}, 0.0, 1, frozenset())
    with pytest.raises(NonConservingInput):
        path_decompose(x, build_local_graphs(inst))


@pytest.mark.parametrize("seed", range(6))
def test_decomposition_recomposes(seed):
    inst = gen_random(12, 30, 8, (1, 2), seed, epsilon=0.1)
    state = prepare_rounding(inst)
    back = state.flow.link_flows()
    for key in set(back) | set(state.xtwo.x):
        assert abs(back.get(key, 0.0) - state.xtwo.x.get(key, 0.0)) < 1e-6
    for paths in state.flow.flows:
        assert math.fsum(f for _, f in paths) == pytest.approx(1.0, abs=1e-9)


# expected_savings

def test_two_halves_on_unit_edge():
    inst = chain4()
    _, total = expected_savings({(0, 1): 0.5, (1, 1): 0.5}, inst, {1})
    assert total == pytest.approx(0.25)


def test_two_certain_uses():
    inst = make(2, [(0, 1, 3)], [(0, 1)])
    per_edge, total = expected_savings({(0, 0): 1.0, (1, 0): 1.0}, inst, {0})
    assert per_edge[0] == total == 3


@pytest.mark.parametrize("seed", range(3))
def test_monte_carlo_agrees_with_formula(seed):
    inst = thin_rich(seed)
    state = prepare_rounding(inst)
    _, exact = expected_savings(state.flow, inst, state.lp.qualifying)
    mean, se = monte_carlo_savings(state.flow, inst, state.lp.qualifying, 10**5, seed)
    assert abs(mean - exact) <= 3 * se + 1e-12


# run_algorithm2

def test_single_pair_objective_zero():
    sol = run_algorithm2(diamond(((S, T),)))
    assert sol.objective == 0 and verify_feasible(diamond(((S, T),)), sol.edges).feasible


def test_diamond_best_of_sixteen():
    assert run_algorithm2(diamond(), trials=16).objective == 1


def test_same_seed_same_solution():
    inst = thin_rich(3)
    a, b = run_algorithm2(inst, 8, 5), run_algorithm2(inst, 8, 5)
    assert a.edges == b.edges and a.objective == b.objective


def test_light_thin_dominant_bound():
    found = 0
    for seed in range(200):
        inst = gen_random(12, 20, 16, (1, 3), seed, epsilon=0.05)
        oracle = brute_force_optimum(inst, collect_optima=True)
        if oracle.objective == 0 or classify_dominance(inst, oracle) != "thin-dominant":
            continue
        if classify_lightness(inst) != "light":
            continue
        found += 1
        eps, m = inst.epsilon, inst.m
        bound = (1 - m ** -eps) * oracle.objective / (4 * m ** (0.5 + 2 * eps))
        assert run_algorithm2(inst, 32, seed).objective >= bound
        if found == 5:
            break
    assert found == 5
