"""Weighted (di)graphs, problem instances and exact shortest distances."""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import UnreachablePair, ValidationError

INF = math.inf

Pair = tuple[int, int]


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Graph with dense node ids ``0..n-1`` and dense edge ids ``0..m-1``.

    Undirected graphs store each edge once; traversal uses it both ways.
    """

    directed: bool
    n: int
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.tails) == len(self.heads) == len(self.weights)):
            raise ValidationError("edge arrays have different lengths")
        if self.n < 0:
            raise ValidationError("negative node count")
        for eid, (u, v, c) in enumerate(zip(self.tails, self.heads, self.weights)):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValidationError(f"edge {eid} has an endpoint outside [0, {self.n})")
            if u == v:
                raise ValidationError(f"edge {eid} is a self-loop")
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise ValidationError(f"edge {eid} weight must be a nonnegative integer")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], directed: bool = True) -> WeightedGraph:
        edges = [tuple(e) for e in edges]
        return cls(
            directed=directed,
            n=n,
            tails=tuple(int(e[0]) for e in edges),
            heads=tuple(int(e[1]) for e in edges),
            weights=tuple(int(e[2]) for e in edges),
        )

    @property
    def m(self) -> int:
        return len(self.weights)

    def edge(self, eid: int) -> tuple[int, int, int]:
        return self.tails[eid], self.heads[eid], self.weights[eid]

    def edge_list(self) -> list[tuple[int, int, int, int]]:
        return [(eid, u, v, c) for eid, (u, v, c) in enumerate(zip(self.tails, self.heads, self.weights))]

    def arcs(self) -> list[tuple[int, int, int]]:
        """All traversable arcs as ``(eid, tail, head)``; undirected edges yield two."""
        out = []
        for eid, (u, v) in enumerate(zip(self.tails, self.heads)):
            out.append((eid, u, v))
            if not self.directed and u != v:
                out.append((eid, v, u))
        return out

    @cached_property
    def out_adj(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, u, v in self.arcs():
            adj[u].append((v, eid))
        for row in adj:
            row.sort()
        return adj

    @cached_property
    def in_adj(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, u, v in self.arcs():
            adj[v].append((u, eid))
        for row in adj:
            row.sort()
        return adj

    def cost(self, edges: Iterable[int]) -> int:
        return sum(self.weights[e] for e in edges)


def _dijkstra(n, adj, weights, source, allowed=None):
    dist = [INF] * n
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, eid in adj[u]:
            if allowed is not None and eid not in allowed:
                continue
            nd = d + weights[eid]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_distances(graph: WeightedGraph, source: int, *, reverse: bool = False,
                       allowed: set[int] | frozenset[int] | None = None) -> list:
    """Exact single-source distances; ``INF`` marks unreachable nodes.

    With ``reverse=True`` the result holds distances *to* ``source``.
    ``allowed`` restricts the search to a subset of edge ids.
    """
    adj = graph.in_adj if reverse else graph.out_adj
    return _dijkstra(graph.n, adj, graph.weights, source, allowed)


@dataclass(frozen=True)
class Path:
    """A walk given by its node sequence and the edge ids between them."""

    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a path with k edges needs k+1 nodes")

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def length(self, graph: WeightedGraph) -> int:
        return graph.cost(self.edges)

    def is_walk_in(self, graph: WeightedGraph) -> bool:
        for i, eid in enumerate(self.edges):
            u, v, _ = graph.edge(eid)
            a, b = self.nodes[i], self.nodes[i + 1]
            if (a, b) != (u, v) and (graph.directed or (a, b) != (v, u)):
                return False
        return True

    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)


@dataclass(frozen=True, eq=False)
class Instance:
    """A CSPDP instance: graph, ordered demand pairs and the ``epsilon`` parameter."""

    graph: WeightedGraph
    pairs: tuple[Pair, ...]
    epsilon: float = 0.5
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValidationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        seen = set()
        unique = []
        for s, t in self.pairs:
            s, t = int(s), int(t)
            if not (0 <= s < self.graph.n and 0 <= t < self.graph.n):
                raise ValidationError(f"pair ({s}, {t}) has a node outside [0, {self.graph.n})")
            if s == t:
                raise ValidationError(f"pair ({s}, {t}) has identical endpoints")
            key = (s, t) if self.graph.directed else (min(s, t), max(s, t))
            if key in seen:
                warnings.warn(f"duplicate demand pair ({s}, {t}) dropped", stacklevel=3)
                continue
            seen.add(key)
            unique.append((s, t))
        object.__setattr__(self, "pairs", tuple(unique))

    @property
    def m(self) -> int:
        return self.graph.m

    def dist_from(self, s: int) -> list:
        key = ("from", s)
        if key not in self._cache:
            self._cache[key] = shortest_distances(self.graph, s)
        return self._cache[key]

    def dist_to(self, t: int) -> list:
        if not self.graph.directed:
            return self.dist_from(t)
        key = ("to", t)
        if key not in self._cache:
            self._cache[key] = shortest_distances(self.graph, t, reverse=True)
        return self._cache[key]

    def distance(self, s: int, t: int):
        return self.dist_from(s)[t]

    def check_reachable(self) -> None:
        for s, t in self.pairs:
            if self.distance(s, t) == INF:
                raise UnreachablePair(s, t)

    def with_pairs(self, pairs: Iterable[Pair]) -> Instance:
        """Same graph and epsilon, different pairs; distance caches are shared."""
        return Instance(self.graph, tuple(pairs), self.epsilon, self._cache)

    def with_epsilon(self, epsilon: float) -> Instance:
        return Instance(self.graph, self.pairs, epsilon, self._cache)
