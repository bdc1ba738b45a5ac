"""Seeded random and grid instance generators."""

from __future__ import annotations

import random

from .errors import InfeasibleParameters
from .graph import INF, Instance, WeightedGraph, shortest_distances


def _sample_pairs(rng: random.Random, graph: WeightedGraph, p: int) -> list[tuple[int, int]]:
    """``p`` distinct reachable pairs, drawn uniformly among all reachable ones."""
    reachable = []
    for s in range(graph.n):
        dist = shortest_distances(graph, s)
        for t in range(graph.n):
            if t != s and dist[t] != INF and (graph.directed or s < t):
                reachable.append((s, t))
    if p > len(reachable):
        raise InfeasibleParameters(f"only {len(reachable)} reachable pairs, {p} requested")
    pairs = rng.sample(reachable, p)
    if not graph.directed:
        pairs = [(t, s) if rng.random() < 0.5 else (s, t) for s, t in pairs]
    return pairs


def gen_random(n: int, m: int, p: int, weight_range: tuple[int, int] = (1, 10), seed: int = 0,
               directed: bool = True, epsilon: float = 0.5) -> Instance:
    """Random simple graph whose underlying undirected graph is connected.

    A random spanning tree (random orientations when directed) comes first,
    then ``m - n + 1`` further distinct edges.
    """
    lo, hi = weight_range
    if n < 2:
        raise InfeasibleParameters("need at least 2 nodes")
    if lo < 0 or hi < lo:
        raise InfeasibleParameters(f"bad weight range {weight_range}")
    capacity = n * (n - 1) if directed else n * (n - 1) // 2
    if not n - 1 <= m <= capacity:
        raise InfeasibleParameters(f"m must lie in [{n - 1}, {capacity}] for n={n}")
    if p > n * (n - 1):
        raise InfeasibleParameters("more pairs than ordered node pairs")
    rng = random.Random(seed)

    def key(u, v):
        return (u, v) if directed else (min(u, v), max(u, v))

    order = list(range(n))
    rng.shuffle(order)
    used = set()
    edges = []
    for i in range(1, n):
        u, v = order[rng.randrange(i)], order[i]
        if directed and rng.random() < 0.5:
            u, v = v, u
        used.add(key(u, v))
        edges.append((u, v, rng.randint(lo, hi)))
    while len(edges) < m:
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or key(u, v) in used:
            continue
        used.add(key(u, v))
        edges.append((u, v, rng.randint(lo, hi)))
    graph = WeightedGraph.from_edges(n, edges, directed)
    return Instance(graph, tuple(_sample_pairs(rng, graph, p)), epsilon)


def gen_grid(rows: int, cols: int, p: int, seed: int = 0, weight_range: tuple[int, int] = (1, 1),
             epsilon: float = 0.5) -> Instance:
    """Undirected ``rows x cols`` grid; node ``r*cols + c``."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InfeasibleParameters("grid needs at least 2 nodes")
    lo, hi = weight_range
    if lo < 0 or hi < lo:
        raise InfeasibleParameters(f"bad weight range {weight_range}")
    rng = random.Random(seed)
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, rng.randint(lo, hi)))
            if r + 1 < rows:
                edges.append((v, v + cols, rng.randint(lo, hi)))
    graph = WeightedGraph.from_edges(rows * cols, edges, directed=False)
    return Instance(graph, tuple(_sample_pairs(rng, graph, p)), epsilon)
