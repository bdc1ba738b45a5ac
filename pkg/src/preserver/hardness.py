"""CSPDP instances built from MAX-REP (label cover) instances.

Layout of the generated digraph, with ``n = |V1| = |V2|``:

* each ``v in V1`` gets a path ``s_i, x_v^1 .. x_v^{2n}, t_i`` of ``2n+1`` edges.
  The odd steps ``x^{2r-1} -> x^{2r}`` cost 1; every other edge costs ``u_max``.
* each ``u in V2`` with global index ``r - 1`` gets ``o_j -> y_u`` (cost
  ``2n u_max``) and a connector threading the weight-1 slot ``r`` of every
  neighbour path: ``y_u -> x_{v1}^{2r-1}`` (0), ``x_{vi}^{2r} -> x_{vi+1}^{2r-1}``
  (2), and ``x_{vl}^{2r} -> d_j`` (``(2n+1) u_max - u_b``).

Every ``o_j -> d_j`` route through a connector then costs ``(4n+1) u_max - 1``
and shares exactly one unit edge with ``p_v`` for each neighbour ``v`` of ``u``,
so the savings of one path per pair equal the number of covered super-edges.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import InvalidPartition, PathExplosion, StructureViolation
from .dag import build_local_graph
from .graph import Instance, Path, WeightedGraph
from .model import PreserverSolution, savings_report
from .oracle import DEFAULT_CAP, enumerate_shortest_paths


@dataclass(frozen=True)
class MaxRepInstance:
    """Bipartite graph on ``V1 = {0..n-1}``, ``V2 = {0..n-1}`` split into ``k`` equal parts each.

    Part ``i`` of either side holds ids ``i*part_size .. (i+1)*part_size - 1``.
    """

    k: int
    part_size: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.k < 1 or self.part_size < 1:
            raise InvalidPartition("need k >= 1 parts of size >= 1")
        n = self.n
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidPartition(f"edge ({a}, {b}) leaves V1 x V2")
            if (a, b) in seen:
                raise InvalidPartition(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @property
    def n(self) -> int:
        return self.k * self.part_size

    def part(self, vertex: int) -> int:
        return vertex // self.part_size

    def members(self, part: int) -> range:
        return range(part * self.part_size, (part + 1) * self.part_size)

    def neighbours(self, u: int) -> list[int]:
        """V1-neighbours of ``u in V2``, ascending."""
        return [a for a, b in self.edges if b == u]

    def degree(self, u: int) -> int:
        return sum(1 for _, b in self.edges if b == u)

    def covered(self, reps_a, reps_b) -> int:
        adjacent = set(self.edges)
        return sum(1 for a in reps_a for b in reps_b if (a, b) in adjacent)


def random_maxrep(k: int, part_size: int, density: float, seed: int = 0) -> MaxRepInstance:
    rng = random.Random(seed)
    n = k * part_size
    edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < density]
    return MaxRepInstance(k, part_size, tuple(edges))


@dataclass
class GadgetLayout:
    k: int
    n: int
    u_max: int
    u_b: dict[int, int]
    s: list[int]
    t: list[int]
    o: list[int]
    d: list[int]
    x: dict[tuple[int, int], int]  # (v, step) -> node
    y: dict[int, int]
    p_path: dict[int, Path] = field(default_factory=dict)
    q_path: dict[int, Path] = field(default_factory=dict)
    roles: list[tuple[str, int, int, int]] = field(default_factory=list)  # (role, part, vertex, step)

    def slot(self, u: int) -> int:
        return u + 1


def generate_cspdp(maxrep: MaxRepInstance, epsilon: float = 0.5) -> tuple[Instance, GadgetLayout]:
    k, n = maxrep.k, maxrep.n
    d_max = max((maxrep.degree(u) for u in range(n)), default=0)
    u_max = 3 * max(d_max, 1)
    u_b = {u: 3 * maxrep.degree(u) - 1 for u in range(n)}

    roles: list[tuple[str, int, int, int]] = []

    def node(role, part=-1, vertex=-1, step=-1):
        roles.append((role, part, vertex, step))
        return len(roles) - 1

    s, t, o, d = [], [], [], []
    for i in range(k):
        s.append(node("s", i))
        t.append(node("t", i))
    for j in range(k):
        o.append(node("o", j))
        d.append(node("d", j))
    x = {(v, step): node("x", maxrep.part(v), v, step) for v in range(n) for step in range(1, 2 * n + 1)}
    y = {u: node("y", maxrep.part(u), u) for u in range(n)}

    edges: list[tuple[int, int, int]] = []
    layout = GadgetLayout(k, n, u_max, u_b, s, t, o, d, x, y, roles=roles)

    def add(a, b, w):
        edges.append((a, b, w))
        return len(edges) - 1

    for v in range(n):
        i = maxrep.part(v)
        seq = [s[i]] + [x[(v, step)] for step in range(1, 2 * n + 1)] + [t[i]]
        ids = [add(seq[0], seq[1], u_max)]
        for step in range(1, 2 * n):
            ids.append(add(seq[step], seq[step + 1], 1 if step % 2 == 1 else u_max))
        ids.append(add(seq[-2], seq[-1], u_max))
        layout.p_path[v] = Path(tuple(seq), tuple(ids))

    for u in range(n):
        j = maxrep.part(u)
        r = layout.slot(u)
        seq = [o[j], y[u]]
        ids = [add(o[j], y[u], 2 * n * u_max)]
        nbrs = maxrep.neighbours(u)
        if not nbrs:
            # isolated vertex: one arc keeps every o_j -> d_j route at equal length
            ids.append(add(y[u], d[j], (2 * n + 1) * u_max - 1))
            seq.append(d[j])
        else:
            prev = y[u]
            for idx, v in enumerate(nbrs):
                entry, leave = x[(v, 2 * r - 1)], x[(v, 2 * r)]
                ids.append(add(prev, entry, 0 if idx == 0 else 2))
                ids.append(layout.p_path[v].edges[2 * r - 1])  # the shared unit edge
                seq += [entry, leave]
                prev = leave
            ids.append(add(prev, d[j], (2 * n + 1) * u_max - u_b[u]))
            seq.append(d[j])
        layout.q_path[u] = Path(tuple(seq), tuple(ids))

    graph = WeightedGraph.from_edges(len(roles), edges, directed=True)
    pairs = [(s[i], t[i]) for i in range(k)] + [(o[j], d[j]) for j in range(k)]
    return Instance(graph, tuple(pairs), epsilon), layout


def maxrep_brute_force(maxrep: MaxRepInstance, cap: int = DEFAULT_CAP) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], int]:
    """Exhaustive best choice of one representative per part; ties go to the first found."""
    if maxrep.part_size ** (2 * maxrep.k) > cap:
        raise PathExplosion(cap, "representative choices")
    parts = [maxrep.members(i) for i in range(maxrep.k)]
    best = None
    for reps_a in itertools.product(*parts):
        for reps_b in itertools.product(*parts):
            score = maxrep.covered(reps_a, reps_b)
            if best is None or score > best[1]:
                best = ((reps_a, reps_b), score)
    return best


def read_representatives(maxrep: MaxRepInstance, layout: GadgetLayout,
                         solution: PreserverSolution) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if solution.witnesses is None:
        raise StructureViolation("solution carries no witness paths")
    reps_a, reps_b = [], []
    for i in range(maxrep.k):
        p = solution.witnesses[(layout.s[i], layout.t[i])]
        match = [v for v in maxrep.members(i) if layout.p_path[v].nodes == p.nodes]
        if not match:
            raise StructureViolation(f"witness for (s_{i}, t_{i}) is not a vertex path")
        reps_a.append(match[0])
    for j in range(maxrep.k):
        p = solution.witnesses[(layout.o[j], layout.d[j])]
        match = [u for u in maxrep.members(j) if layout.q_path[u].nodes == p.nodes]
        if not match:
            raise StructureViolation(f"witness for (o_{j}, d_{j}) is not a connector path")
        reps_b.append(match[0])
    return tuple(reps_a), tuple(reps_b)


@dataclass
class Correspondence:
    representatives: tuple[tuple[int, ...], tuple[int, ...]]
    covered: int
    savings: int

    @property
    def match(self) -> bool:
        return self.covered == self.savings


def verify_correspondence(maxrep: MaxRepInstance, generated: Instance, layout: GadgetLayout,
                          solution: PreserverSolution) -> Correspondence:
    reps = read_representatives(maxrep, layout, solution)
    covered = maxrep.covered(*reps)
    savings = savings_report(generated, solution).objective
    return Correspondence(reps, covered, savings)


def check_path_structure(generated: Instance, layout: GadgetLayout, maxrep: MaxRepInstance,
                         cap: int = DEFAULT_CAP) -> bool:
    """Shortest paths are exactly the vertex paths and connector paths of each part."""
    for i in range(maxrep.k):
        found = {p.nodes for p in enumerate_shortest_paths(build_local_graph(generated, (layout.s[i], layout.t[i])), cap)}
        if found != {layout.p_path[v].nodes for v in maxrep.members(i)}:
            return False
    for j in range(maxrep.k):
        found = {p.nodes for p in enumerate_shortest_paths(build_local_graph(generated, (layout.o[j], layout.d[j])), cap)}
        if found != {layout.q_path[u].nodes for u in maxrep.members(j)}:
            return False
    return True


def expected_counts(maxrep: MaxRepInstance) -> tuple[int, int]:
    """Closed-form node and edge counts of the generated graph."""
    n = maxrep.n
    nodes = 4 * maxrep.k + 2 * n * n + n
    connectors = sum(d + 1 if d else 1 for d in (maxrep.degree(u) for u in range(n)))
    edges = n * (2 * n + 1) + n + connectors
    return nodes, edges
