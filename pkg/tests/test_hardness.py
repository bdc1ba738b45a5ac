import itertools

import pytest

from preserver.dag import build_local_graph
from preserver.errors import InvalidPartition, PathExplosion, StructureViolation
from preserver.hardness import (MaxRepInstance, check_path_structure, expected_counts, generate_cspdp,
                                maxrep_brute_force, random_maxrep, verify_correspondence)
from preserver.model import solution_from_paths
from preserver.oracle import brute_force_optimum, enumerate_shortest_paths


def single_edge():
    return MaxRepInstance(1, 1, ((0, 0),))


def test_single_edge_gadget_weights():
    inst, layout = generate_cspdp(single_edge())
    g = inst.graph
    assert layout.u_max == 3 and layout.u_b[0] == 2
    assert [g.weights[e] for e in layout.p_path[0].edges] == [3, 1, 3]
    q = layout.q_path[0].edges
    assert g.weights[q[0]] == 6 and g.weights[q[-1]] == 3 * 3 - 2
    shared = set(layout.p_path[0].edges) & set(q)
    assert len(shared) == 1 and g.weights[shared.pop()] == 1
    assert brute_force_optimum(inst).objective == 1


def test_single_edge_correspondence():
    maxrep = single_edge()
    inst, layout = generate_cspdp(maxrep)
    res = verify_correspondence(maxrep, inst, layout, brute_force_optimum(inst).solution)
    assert res.representatives == ((0,), (0,)) and res.covered == 1 == res.savings and res.match


def test_non_adjacent_representatives():
    maxrep = MaxRepInstance(1, 2, ((0, 0),))
    inst, layout = generate_cspdp(maxrep)
    paths = {(layout.s[0], layout.t[0]): layout.p_path[1], (layout.o[0], layout.d[0]): layout.q_path[0]}
    res = verify_correspondence(maxrep, inst, layout, solution_from_paths(inst, paths))
    assert res.covered == 0 == res.savings


def test_foreign_witness_is_a_structure_violation():
    maxrep = single_edge()
    inst, layout = generate_cspdp(maxrep)
    sol = brute_force_optimum(inst).solution
    sol.witnesses[(layout.s[0], layout.t[0])] = layout.q_path[0]
    with pytest.raises(StructureViolation):
        verify_correspondence(maxrep, inst, layout, sol)


@pytest.mark.parametrize("seed", range(20))
def test_counts_and_published_bounds(seed):
    maxrep = random_maxrep(1 + seed % 3, 1 + seed % 2, 0.5, seed)
    inst, _ = generate_cspdp(maxrep)
    n = maxrep.n
    assert len(inst.pairs) == 2 * maxrep.k
    assert inst.graph.m <= (n + n) * (2 * n + 2)
    assert (inst.graph.n, inst.graph.m) == expected_counts(maxrep)


def test_invalid_partitions():
    with pytest.raises(InvalidPartition):
        MaxRepInstance(0, 2, ())
    with pytest.raises(InvalidPartition):
        MaxRepInstance(1, 2, ((0, 2),))
    with pytest.raises(InvalidPartition):
        MaxRepInstance(1, 2, ((0, 1), (0, 1)))


def test_brute_force_single_edge():
    assert maxrep_brute_force(single_edge())[1] == 1


def test_brute_force_picks_the_adjacent_vertex():
    reps, score = maxrep_brute_force(MaxRepInstance(1, 2, ((0, 0),)))
    assert score == 1 and reps[0] == (0,)


def test_brute_force_cap():
    with pytest.raises(PathExplosion):
        maxrep_brute_force(random_maxrep(3, 3, 0.5), cap=100)


@pytest.mark.parametrize("seed", range(5))
def test_brute_force_recount(seed):
    maxrep = random_maxrep(2, 2, 0.5, seed)
    reps, score = maxrep_brute_force(maxrep)
    edges = set(maxrep.edges)
    assert score == sum((a, b) in edges for a in reps[0] for b in reps[1])
    best = max(sum((a, b) in edges for a in ra for b in rb)
               for ra in itertools.product(*[maxrep.members(i) for i in range(2)])
               for rb in itertools.product(*[maxrep.members(i) for i in range(2)]))
    assert score == best


@pytest.mark.parametrize("seed", range(10))
def test_oracles_agree(seed):
    maxrep = random_maxrep(1 + seed % 2, 2 + seed % 2, 0.5, seed)
    inst, layout = generate_cspdp(maxrep)
    opt = brute_force_optimum(inst)
    assert opt.objective == maxrep_brute_force(maxrep)[1]
    assert verify_correspondence(maxrep, inst, layout, opt.solution).match


def test_single_edge_structure():
    maxrep = single_edge()
    inst, layout = generate_cspdp(maxrep)
    assert check_path_structure(inst, layout, maxrep)
    for pair in inst.pairs:
        assert len(enumerate_shortest_paths(build_local_graph(inst, pair))) == 1


def test_two_parts_of_two():
    maxrep = random_maxrep(2, 2, 0.6, 1)
    inst, layout = generate_cspdp(maxrep)
    for i in range(2):
        assert len(enumerate_shortest_paths(build_local_graph(inst, (layout.s[i], layout.t[i])))) == 2


@pytest.mark.parametrize("seed", range(10))
def test_structure_on_random_tiny_instances(seed):
    maxrep = random_maxrep(1 + seed % 2, 1 + seed % 3, 0.4, seed)
    inst, layout = generate_cspdp(maxrep)
    assert check_path_structure(inst, layout, maxrep)


def test_isolated_vertex_keeps_connector_length():
    maxrep = MaxRepInstance(1, 2, ((0, 0),))  # V2 vertex 1 has no neighbour
    inst, layout = generate_cspdp(maxrep)
    g = inst.graph
    assert layout.q_path[0].length(g) == layout.q_path[1].length(g) == (4 * 2 + 1) * layout.u_max - 1
