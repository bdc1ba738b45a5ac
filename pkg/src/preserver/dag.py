"""Per-pair shortest-path subgraphs and path selection inside them.

The local graph of a pair ``(s, t)`` keeps exactly the arcs ``u -> v`` with
``dist(s, u) + c + dist(v, t) == dist(s, t)``.  Along any such arc
``dist(s, v) == dist(s, u) + c``, so every ``s -> t`` walk inside the local
graph has length ``dist(s, t)``.  Cycles can only consist of zero-weight arcs;
they are contracted to strongly connected components wherever an acyclic order
is required.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import networkx as nx

from .errors import CyclicAfterContraction, UnreachablePair
from .graph import INF, Instance, Pair, Path


@dataclass(frozen=True, eq=False)
class ShortestPathDag:
    pair: Pair
    dist: int
    arcs: tuple[tuple[int, int, int], ...]  # (eid, tail, head), sorted
    nodes: frozenset[int]
    ds: Mapping[int, int] = field(repr=False)

    @property
    def source(self) -> int:
        return self.pair[0]

    @property
    def target(self) -> int:
        return self.pair[1]

    @cached_property
    def edges(self) -> frozenset[int]:
        return frozenset(eid for eid, _, _ in self.arcs)

    @cached_property
    def succ(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {v: [] for v in self.nodes}
        for eid, u, v in self.arcs:
            out[u].append((v, eid))
        for row in out.values():
            row.sort()
        return out

    @cached_property
    def pred(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {v: [] for v in self.nodes}
        for eid, u, v in self.arcs:
            out[v].append((u, eid))
        for row in out.values():
            row.sort()
        return out

    @cached_property
    def has_zero_cycle(self) -> bool:
        return self.components[0] is not None

    @cached_property
    def components(self):
        """``(comp_of, members, order)`` of the zero-weight SCC condensation.

        ``comp_of`` is ``None`` when every component is a single node; ``order``
        lists component ids topologically (source side first).
        """
        zero_arcs = [(u, v) for _, u, v in self.arcs if self.ds[u] == self.ds[v]]
        if zero_arcs:
            g = nx.DiGraph()
            g.add_nodes_from(sorted(self.nodes))
            g.add_edges_from(zero_arcs)
            if not nx.is_directed_acyclic_graph(g):
                cond = nx.condensation(g)
                mapping = cond.graph["mapping"]
                members = {c: sorted(cond.nodes[c]["members"]) for c in cond.nodes}
                full = nx.DiGraph()
                full.add_nodes_from(cond.nodes)
                for _, u, v in self.arcs:
                    if mapping[u] != mapping[v]:
                        full.add_edge(mapping[u], mapping[v])
                if not nx.is_directed_acyclic_graph(full):
                    raise CyclicAfterContraction(f"local graph of {self.pair} has a positive-weight cycle")
                order = list(nx.lexicographical_topological_sort(full, key=lambda c: members[c][0]))
                return mapping, members, order
            ranked = list(nx.lexicographical_topological_sort(g, key=lambda v: (self.ds[v], v)))
            ranked.sort(key=lambda v: self.ds[v])  # stable: zero-arc order kept within equal distances
            return None, None, ranked
        return None, None, sorted(self.nodes, key=lambda v: (self.ds[v], v))

    def comp(self, v: int) -> int:
        comp_of = self.components[0]
        return v if comp_of is None else comp_of[v]

    def members(self, c: int) -> list[int]:
        members = self.components[1]
        return [c] if members is None else members[c]

    def restrict(self, edges: Iterable[int]) -> ShortestPathDag:
        keep = set(edges)
        arcs = tuple(a for a in self.arcs if a[0] in keep)
        nodes = frozenset({self.source, self.target}.union(*({u, v} for _, u, v in arcs)))
        return ShortestPathDag(self.pair, self.dist, arcs, nodes, {v: self.ds[v] for v in nodes})


def build_local_graph(instance: Instance, pair: Pair) -> ShortestPathDag:
    s, t = pair
    ds = instance.dist_from(s)
    dt = instance.dist_to(t)
    total = ds[t]
    if total == INF:
        raise UnreachablePair(s, t)
    arcs = []
    for eid, u, v in instance.graph.arcs():
        if ds[u] + instance.graph.weights[eid] + dt[v] == total:
            arcs.append((eid, u, v))
    arcs.sort()
    nodes = {s, t}
    for _, u, v in arcs:
        nodes.add(u)
        nodes.add(v)
    return ShortestPathDag((s, t), total, tuple(arcs), frozenset(nodes), {v: ds[v] for v in nodes})


def build_local_graphs(instance: Instance) -> list[ShortestPathDag]:
    return [build_local_graph(instance, p) for p in instance.pairs]


def _walk_inside(dag, comp, start, goal, succ):
    """Fewest-hop walk between two nodes of the same zero-weight component."""
    if start == goal:
        return [start], []
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v, eid in succ[u]:
            if v in prev or dag.comp(v) != comp:
                continue
            prev[v] = (u, eid)
            if v == goal:
                nodes, edges = [v], []
                while prev[nodes[-1]] is not None:
                    p, e = prev[nodes[-1]]
                    edges.append(e)
                    nodes.append(p)
                return nodes[::-1], edges[::-1]
            queue.append(v)
    raise CyclicAfterContraction("component is not strongly connected")


def max_weight_path(dag: ShortestPathDag, weights: Mapping[int, int] | None = None, *,
                    start: int | None = None, goal: int | None = None,
                    reverse: bool = False) -> tuple[Path, int]:
    """Maximum-weight walk ``start -> goal`` by DP over the topological order.

    Missing weights count as zero, so ``weights=None`` returns the
    lexicographically smallest node sequence among all paths.  With
    ``reverse=True`` the search runs against arc direction (``goal`` is
    upstream of ``start``) and the returned path is re-oriented forward.
    Weights must be exact (integers) for the tie-break to be meaningful.
    """
    start = (dag.target if reverse else dag.source) if start is None else start
    goal = (dag.source if reverse else dag.target) if goal is None else goal
    succ = dag.pred if reverse else dag.succ
    w = (lambda eid: 0) if weights is None else (lambda eid: weights.get(eid, 0))
    _, _, order = dag.components
    goal_c = dag.comp(goal)

    value = {goal_c: 0}
    for c in (order if reverse else reversed(order)):
        if c == goal_c:
            continue
        best = None
        for x in dag.members(c):
            for y, eid in succ[x]:
                d = dag.comp(y)
                if d == c or d not in value:
                    continue
                cand = w(eid) + value[d]
                if best is None or cand > best:
                    best = cand
        if best is not None:
            value[c] = best
    start_c = dag.comp(start)
    if start_c not in value:
        raise UnreachablePair(*((goal, start) if reverse else (start, goal)))

    nodes, edges = [start], []
    node = start
    while True:
        c = dag.comp(node)
        if c == goal_c:
            more_n, more_e = _walk_inside(dag, c, node, goal, succ)
            nodes += more_n[1:]
            edges += more_e
            break
        choice = None
        for x in dag.members(c):
            for y, eid in succ[x]:
                d = dag.comp(y)
                if d == c or d not in value or w(eid) + value[d] != value[c]:
                    continue
                key = (x != node, x, y, eid)
                if choice is None or key < choice:
                    choice = key
        _, x, y, eid = choice
        more_n, more_e = _walk_inside(dag, c, node, x, succ)
        nodes += more_n[1:] + [y]
        edges += more_e + [eid]
        node = y
    if reverse:
        nodes.reverse()
        edges.reverse()
    return Path(tuple(nodes), tuple(edges)), value[start_c]


def lexicographic_path(dag: ShortestPathDag) -> Path:
    return max_weight_path(dag)[0]


def erase_loops(nodes: list[int], edges: list[int]) -> tuple[list[int], list[int]]:
    out_n, out_e, where = [nodes[0]], [], {nodes[0]: 0}
    for v, eid in zip(nodes[1:], edges):
        if v in where:
            k = where[v]
            for dropped in out_n[k + 1:]:
                del where[dropped]
            out_n = out_n[:k + 1]
            out_e = out_e[:k]
        else:
            where[v] = len(out_n)
            out_n.append(v)
            out_e.append(eid)
    return out_n, out_e


def extend_arc(dag: ShortestPathDag, arc: tuple[int, int, int]) -> Path:
    """A source-to-target path of ``dag`` through ``arc = (eid, u, v)``.

    In an acyclic local graph the result always contains the arc; inside a
    zero-weight cycle the loop-erased walk may bypass it.
    """
    eid, u, v = arc
    back, _ = max_weight_path(dag, start=u, goal=dag.source, reverse=True)
    fwd, _ = max_weight_path(dag, start=v, goal=dag.target)
    nodes = list(back.nodes) + list(fwd.nodes)
    edges = list(back.edges) + [eid] + list(fwd.edges)
    if len(set(nodes)) != len(nodes):
        nodes, edges = erase_loops(nodes, edges)
    return Path(tuple(nodes), tuple(edges))
