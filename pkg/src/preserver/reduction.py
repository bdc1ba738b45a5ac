"""Undirected-to-directed reduction with solution mapping in both directions.

Each undirected edge ``{i, j}`` of weight ``c`` becomes a gadget with two new
nodes ``a = v'_ij`` and ``b = v''_ij``::

    i -> a, j -> a  (weight 0)
    a -> b          (weight c)
    b -> i, b -> j  (weight 0)

Crossing the gadget in either direction costs exactly ``c`` and the only way
out of ``a`` is the weighted middle arc, so distances between original nodes
are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlreadyDirected, InfeasibleInput, ValidationError
from .graph import Instance, Path, WeightedGraph
from .model import PreserverSolution, verify_feasible


@dataclass(frozen=True)
class GadgetRecord:
    orig_edge: int
    entry: int  # v'
    exit: int  # v''
    first_edge: int  # ids first_edge .. first_edge+4; the middle edge is first_edge+4

    @property
    def mid_edge(self) -> int:
        return self.first_edge + 4


@dataclass(frozen=True)
class ReductionMap:
    original: Instance
    reduced: Instance
    records: tuple[GadgetRecord, ...]

    def by_mid_edge(self) -> dict[int, GadgetRecord]:
        return {r.mid_edge: r for r in self.records}


def undirected_to_directed(instance: Instance) -> tuple[Instance, ReductionMap]:
    g = instance.graph
    if g.directed:
        raise AlreadyDirected("instance is already directed")
    n = g.n
    edges, records = [], []
    for eid, i, j, c in g.edge_list():
        a, b = n + 2 * eid, n + 2 * eid + 1
        records.append(GadgetRecord(eid, a, b, len(edges)))
        edges += [(i, a, 0), (j, a, 0), (b, i, 0), (b, j, 0), (a, b, c)]
    reduced_graph = WeightedGraph.from_edges(n + 2 * g.m, edges, directed=True)
    reduced = Instance(reduced_graph, instance.pairs, instance.epsilon)
    return reduced, ReductionMap(instance, reduced, tuple(records))


def _path_back(rmap: ReductionMap, path: Path) -> Path:
    n = rmap.original.graph.n
    mids = rmap.by_mid_edge()
    nodes = tuple(v for v in path.nodes if v < n)
    edges = tuple(mids[e].orig_edge for e in path.edges if e in mids)
    if len(nodes) != len(edges) + 1:
        raise ValidationError("directed witness does not cross gadgets whole")
    return Path(nodes, edges)


def map_solution_back(rmap: ReductionMap, directed_solution: PreserverSolution) -> PreserverSolution:
    """Keep an original edge iff its gadget's middle arc is selected."""
    verdict = verify_feasible(rmap.reduced, directed_solution.edges)
    if not verdict.feasible:
        raise InfeasibleInput(f"directed solution violates pairs {verdict.violations}")
    edges = frozenset(r.orig_edge for r in rmap.records if r.mid_edge in directed_solution.edges)
    witnesses = None
    if directed_solution.witnesses is not None:
        witnesses = {pair: _path_back(rmap, p) for pair, p in directed_solution.witnesses.items()}
    cost = rmap.original.graph.cost(edges)
    upper = directed_solution.upper_bound
    return PreserverSolution(edges, witnesses, cost, upper, upper - cost, dict(directed_solution.meta))


def map_solution_forward(rmap: ReductionMap, solution: PreserverSolution) -> PreserverSolution:
    """All five gadget arcs for every chosen undirected edge."""
    g = rmap.original.graph
    recs = rmap.records
    edges = set()
    for e in solution.edges:
        edges.update(range(recs[e].first_edge, recs[e].first_edge + 5))
    witnesses = None
    if solution.witnesses is not None:
        witnesses = {}
        for pair, p in solution.witnesses.items():
            nodes, arcs = [p.nodes[0]], []
            for k, e in enumerate(p.edges):
                a, b = p.nodes[k], p.nodes[k + 1]
                r = recs[e]
                tail = g.tails[e]
                arcs += [r.first_edge + (0 if a == tail else 1), r.mid_edge,
                         r.first_edge + (2 if b == tail else 3)]
                nodes += [r.entry, r.exit, b]
            witnesses[pair] = Path(tuple(nodes), tuple(arcs))
    edges = frozenset(edges)
    cost = rmap.reduced.graph.cost(edges)
    return PreserverSolution(edges, witnesses, cost, solution.upper_bound, solution.upper_bound - cost)
