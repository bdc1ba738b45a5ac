"""Text formats: instances, solutions, reduction maps, gadget layouts, MAX-REP inputs.

Instance files::

    cspdp <directed|undirected> <n> <m> <p>
    e <tail> <head> <weight>      (m lines)
    q <s> <t>                     (p lines)

``#`` starts a comment; blank lines are ignored.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .graph import Instance, Path, WeightedGraph
from .hardness import GadgetLayout, MaxRepInstance
from .model import PreserverSolution
from .reduction import ReductionMap


def _records(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _ints(no, fields, count, what):
    if len(fields) != count:
        raise ParseError(no, f"{what} needs {count} fields, got {len(fields)}")
    out = []
    for f in fields:
        if not (f.isascii() and f.isdigit()):
            raise ParseError(no, f"{what} field {f!r} is not a nonnegative integer")
        out.append(int(f))
    return out


def parse_instance_text(text: str, epsilon: float = 0.5) -> Instance:
    records = list(_records(text))
    if not records:
        raise ParseError(0, "empty instance file")
    no, head = records[0]
    if len(head) != 5 or head[0] != "cspdp" or head[1] not in ("directed", "undirected"):
        raise ParseError(no, "header must be 'cspdp <directed|undirected> <n> <m> <p>'")
    n, m, p = _ints(no, head[2:], 3, "header")
    body = records[1:]
    if len(body) != m + p:
        raise ParseError(body[-1][0] if body else no, f"expected {m} edge and {p} pair lines, got {len(body)} records")
    edges, pairs = [], []
    for k, (no, fields) in enumerate(body):
        tag = "e" if k < m else "q"
        if fields[0] != tag:
            raise ParseError(no, f"expected a '{tag}' record")
        if tag == "e":
            u, v, w = _ints(no, fields[1:], 3, "edge")
            if u >= n or v >= n:
                raise ParseError(no, f"edge endpoint outside [0, {n})")
            if u == v:
                raise ParseError(no, "self-loops are not allowed")
            edges.append((u, v, w))
        else:
            s, t = _ints(no, fields[1:], 2, "pair")
            if s >= n or t >= n:
                raise ParseError(no, f"pair endpoint outside [0, {n})")
            if s == t:
                raise ParseError(no, "pair endpoints must differ")
            pairs.append((s, t))
    graph = WeightedGraph.from_edges(n, edges, directed=head[1] == "directed")
    return Instance(graph, tuple(pairs), epsilon)


def format_instance(instance: Instance) -> str:
    g = instance.graph
    lines = [f"cspdp {'directed' if g.directed else 'undirected'} {g.n} {g.m} {len(instance.pairs)}"]
    lines += [f"e {u} {v} {c}" for _, u, v, c in g.edge_list()]
    lines += [f"q {s} {t}" for s, t in instance.pairs]
    return "\n".join(lines) + "\n"


def parse_instance(path, epsilon: float = 0.5) -> Instance:
    with open(path) as fh:
        return parse_instance_text(fh.read(), epsilon)


def write_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_instance(instance))


def instance_hash(instance: Instance) -> str:
    return hashlib.sha256(format_instance(instance).encode()).hexdigest()


@dataclass
class SolutionFile:
    instance_hash: str
    algorithm: str
    epsilon: float
    seed: int
    trials: int
    edges: list[int]
    upper_bound: int
    cost: int
    objective: int
    feasible: bool
    paths: dict[tuple[int, int], list[int]] = field(default_factory=dict)


def format_solution(instance: Instance, solution: PreserverSolution, *, algorithm: str, seed: int = 0,
                    trials: int = 0, feasible: bool = True) -> str:
    lines = [
        "cspdp-solution",
        f"instance {instance_hash(instance)}",
        f"algorithm {algorithm}",
        f"epsilon {instance.epsilon!r}",
        f"seed {seed}",
        f"trials {trials}",
        "H " + " ".join(str(e) for e in sorted(solution.edges)),
        f"U {solution.upper_bound}",
        f"cost {solution.cost}",
        f"objective {solution.objective}",
        f"feasible {int(feasible)}",
    ]
    for pair in instance.pairs:
        if solution.witnesses and pair in solution.witnesses:
            nodes = " ".join(str(v) for v in solution.witnesses[pair].nodes)
            lines.append(f"path {pair[0]} {pair[1]} {nodes}")
    return "\n".join(lines) + "\n"


def parse_solution_text(text: str) -> SolutionFile:
    values: dict[str, list[str]] = {}
    paths = {}
    records = list(_records(text))
    if not records or records[0][1] != ["cspdp-solution"]:
        raise ParseError(records[0][0] if records else 0, "missing 'cspdp-solution' header")
    for no, fields in records[1:]:
        key = fields[0]
        if key == "path":
            nums = _ints(no, fields[1:], len(fields) - 1, "path")
            if len(nums) < 3:
                raise ParseError(no, "path needs s, t and a node sequence")
            paths[(nums[0], nums[1])] = nums[2:]
        elif key == "H":
            values[key] = fields[1:]
        else:
            if len(fields) != 2:
                raise ParseError(no, f"'{key}' takes exactly one value")
            values[key] = fields[1:]
    try:
        return SolutionFile(
            instance_hash=values["instance"][0],
            algorithm=values["algorithm"][0],
            epsilon=float(values["epsilon"][0]),
            seed=int(values["seed"][0]),
            trials=int(values["trials"][0]),
            edges=[int(e) for e in values.get("H", [])],
            upper_bound=int(values["U"][0]),
            cost=int(values["cost"][0]),
            objective=int(values["objective"][0]),
            feasible=values["feasible"][0] == "1",
            paths=paths,
        )
    except KeyError as exc:
        raise ParseError(0, f"missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def parse_solution(path) -> SolutionFile:
    with open(path) as fh:
        return parse_solution_text(fh.read())


def path_from_nodes(instance: Instance, edges, nodes: list[int]) -> Path:
    """Rebuild edge ids for a node sequence, cheapest (then lowest id) edge of ``edges`` per hop."""
    g = instance.graph
    allowed = set(edges)
    ids = []
    for a, b in zip(nodes, nodes[1:]):
        options = [(g.weights[e], e) for v, e in g.out_adj[a] if v == b and e in allowed]
        if not options:
            raise ValidationError(f"no selected edge from {a} to {b}")
        ids.append(min(options)[1])
    return Path(tuple(nodes), tuple(ids))


def format_map(rmap: ReductionMap) -> str:
    return "".join(f"{r.orig_edge} {r.entry} {r.exit} {r.mid_edge}\n" for r in rmap.records)


def format_layout(layout: GadgetLayout) -> str:
    lines = [f"layout {layout.k} {layout.n // layout.k} {layout.u_max}"]
    lines += [f"node {i} {role} {part} {vertex} {step}" for i, (role, part, vertex, step) in enumerate(layout.roles)]
    return "\n".join(lines) + "\n"


def parse_maxrep_text(text: str) -> MaxRepInstance:
    """``maxrep <k> <part_size>`` followed by ``e <v1> <v2>`` lines."""
    records = list(_records(text))
    if not records or records[0][1][0] != "maxrep":
        raise ParseError(records[0][0] if records else 0, "header must be 'maxrep <k> <part_size>'")
    no, head = records[0]
    k, size = _ints(no, head[1:], 2, "header")
    edges = []
    for no, fields in records[1:]:
        if fields[0] != "e":
            raise ParseError(no, "expected an 'e' record")
        edges.append(tuple(_ints(no, fields[1:], 2, "edge")))
    return MaxRepInstance(k, size, tuple(edges))


def read_text(path) -> str:
    with open(path) as fh:
        return fh.read()


def write_text(path, text: str) -> None:
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)
