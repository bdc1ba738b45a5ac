"""Thick/thin classification, solutions, feasibility and savings accounting."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .dag import ShortestPathDag, build_local_graph, build_local_graphs, lexicographic_path
from .errors import NonShortestWitness, UnreachablePair, ValidationError
from .graph import INF, Instance, Pair, Path, shortest_distances


def trivial_upper_bound(instance: Instance) -> int:
    """Cost of routing every pair on its own disjoint shortest path."""
    total = 0
    for s, t in instance.pairs:
        d = instance.distance(s, t)
        if d == INF:
            raise UnreachablePair(s, t)
        total += d
    return total


@dataclass(frozen=True)
class ThicknessProfile:
    multiplicity: tuple[int, ...]  # v_e per edge id
    threshold: float
    thick: frozenset[int]
    thin: frozenset[int]
    thin_count: tuple[int, ...]  # b per pair, aligned with instance.pairs
    m: int

    def is_light_pair(self, index: int) -> bool:
        """``b < sqrt(m)``, decided exactly as ``b*b < m``."""
        b = self.thin_count[index]
        return b * b < self.m

    def light_pairs(self) -> list[int]:
        return [i for i in range(len(self.thin_count)) if self.is_light_pair(i)]

    def qualifying_edges(self, dags: Sequence[ShortestPathDag]) -> frozenset[int]:
        """Thin edges lying in the local graph of at least one light pair."""
        out = set()
        for i in self.light_pairs():
            out.update(e for e in dags[i].edges if e in self.thin)
        return frozenset(out)


def classify_edges(instance: Instance, dags: Sequence[ShortestPathDag] | None = None) -> ThicknessProfile:
    if dags is None:
        dags = build_local_graphs(instance)
    m = instance.m
    v = [0] * m
    for dag in dags:
        for e in dag.edges:
            v[e] += 1
    threshold = len(instance.pairs) / m ** (0.5 + instance.epsilon) if m else math.inf
    thick = frozenset(e for e in range(m) if v[e] >= threshold)
    thin = frozenset(range(m)) - thick
    b = tuple(sum(1 for e in dag.edges if e in thin) for dag in dags)
    return ThicknessProfile(tuple(v), threshold, thick, thin, b, m)


@dataclass
class PreserverSolution:
    edges: frozenset[int]
    witnesses: dict[Pair, Path] | None = None
    cost: int = 0
    upper_bound: int = 0
    objective: int = 0
    meta: dict = field(default_factory=dict)


def solution_from_paths(instance: Instance, paths: Mapping[Pair, Path], extra_edges: Iterable[int] = ()) -> PreserverSolution:
    """Union of one path per pair; the objective is ``U - c(H)``."""
    edges = set(extra_edges)
    for p in paths.values():
        edges.update(p.edges)
    edges = frozenset(edges)
    cost = instance.graph.cost(edges)
    upper = trivial_upper_bound(instance)
    witnesses = {pair: paths[pair] for pair in instance.pairs if pair in paths}
    return PreserverSolution(edges, witnesses, cost, upper, upper - cost)


@dataclass
class FeasibilityVerdict:
    feasible: bool
    violations: list[Pair]


def verify_feasible(instance: Instance, edges: Iterable[int]) -> FeasibilityVerdict:
    allowed = frozenset(edges)
    bad = []
    by_source: dict[int, list] = {}
    for s, t in instance.pairs:
        if s not in by_source:
            by_source[s] = shortest_distances(instance.graph, s, allowed=allowed)
        if by_source[s][t] != instance.distance(s, t):
            bad.append((s, t))
    return FeasibilityVerdict(not bad, bad)


@dataclass
class SavingsReport:
    upper_bound: int
    cost: int
    objective: int
    usage: dict[int, int]  # u_e
    per_edge: dict[int, int]  # (u_e - 1) c(e) for e in H


def savings_report(instance: Instance, solution: PreserverSolution) -> SavingsReport:
    if solution.witnesses is None:
        raise ValidationError("savings need one witness path per pair")
    g = instance.graph
    usage: Counter = Counter()
    for s, t in instance.pairs:
        p = solution.witnesses.get((s, t))
        if p is None:
            raise ValidationError(f"no witness for pair ({s}, {t})")
        if p.source != s or p.target != t or not p.is_walk_in(g):
            raise NonShortestWitness(f"witness for ({s}, {t}) is not an s-t path")
        if p.length(g) != instance.distance(s, t):
            raise NonShortestWitness(f"witness for ({s}, {t}) has length {p.length(g)}, "
                                     f"distance is {instance.distance(s, t)}")
        if not set(p.edges) <= solution.edges:
            raise ValidationError(f"witness for ({s}, {t}) leaves H")
        usage.update(p.edges)
    upper = trivial_upper_bound(instance)
    cost = g.cost(solution.edges)
    per_edge = {e: (usage[e] - 1) * g.weights[e] for e in sorted(solution.edges)}
    objective = upper - cost
    if objective != sum(per_edge.values()):
        raise AssertionError("savings decomposition identity violated")
    return SavingsReport(upper, cost, objective, dict(usage), per_edge)


def witness_in(instance: Instance, edges: frozenset[int], pair: Pair, dag: ShortestPathDag | None = None) -> Path:
    """Lexicographically smallest shortest path of ``pair`` using only ``edges``."""
    dag = dag or build_local_graph(instance, pair)
    return lexicographic_path(dag.restrict(edges))


def finalize(instance: Instance, edges: Iterable[int], witnesses: Mapping[Pair, Path] | None = None,
             dags: Sequence[ShortestPathDag] | None = None) -> PreserverSolution:
    """Build a solution for ``instance`` from a feasible edge set.

    Given witnesses are kept; the rest are recomputed inside ``edges``, and
    ``H`` is trimmed to the union of witnesses.
    """
    edges = frozenset(edges)
    witnesses = dict(witnesses or {})
    paths = {}
    for i, pair in enumerate(instance.pairs):
        if pair in witnesses and set(witnesses[pair].edges) <= edges:
            paths[pair] = witnesses[pair]
        else:
            paths[pair] = witness_in(instance, edges, pair, dags[i] if dags else None)
    return solution_from_paths(instance, paths)
