"""Exhaustive ground truth for desk-scale instances.

The optimum of the integer program is found by trying every combination of
one shortest path per pair.  A combination's savings are
``sum_e (count_e - [count_e > 0]) * c(e)``; restricting the sum to a subset of
edges gives the thin-only and LP-restricted variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dag import ShortestPathDag, build_local_graphs
from .errors import PathExplosion
from .graph import Instance, Path
from .model import PreserverSolution, ThicknessProfile, classify_edges, solution_from_paths

DEFAULT_CAP = 10**6
MAX_OPTIMA = 10**4
_CHUNK = 1 << 15


def enumerate_shortest_paths(dag: ShortestPathDag, cap: int = DEFAULT_CAP) -> list[Path]:
    """All simple source-to-target paths of the local graph, lexicographic order."""
    s, t = dag.pair
    out: list[Path] = []
    nodes, edges, on_path = [s], [], {s}
    # iterative DFS over (node, next successor index)
    stack = [0]
    while stack:
        u = nodes[-1]
        if u == t:
            out.append(Path(tuple(nodes), tuple(edges)))
            if len(out) > cap:
                raise PathExplosion(cap, f"shortest paths for pair {dag.pair}")
            stack.pop()
            on_path.discard(nodes.pop())
            if edges:
                edges.pop()
            continue
        succ = dag.succ[u]
        i = stack[-1]
        while i < len(succ) and succ[i][0] in on_path:
            i += 1
        if i == len(succ):
            stack.pop()
            on_path.discard(nodes.pop())
            if edges:
                edges.pop()
            continue
        stack[-1] = i + 1
        v, eid = succ[i]
        nodes.append(v)
        edges.append(eid)
        on_path.add(v)
        stack.append(0)
    return out


@dataclass
class OracleResult:
    objective: int
    choice: tuple[int, ...]  # path index per pair
    paths: list[list[Path]]
    solution: PreserverSolution
    examined: int
    optima: list[tuple[int, ...]] | None = None  # all optimal choices, when collected

    @property
    def edges(self) -> frozenset[int]:
        return self.solution.edges

    def selection(self, choice: Sequence[int] | None = None) -> list[Path]:
        choice = self.choice if choice is None else choice
        return [self.paths[i][k] for i, k in enumerate(choice)]


def _incidence(paths: list[Path], m: int) -> np.ndarray:
    mat = np.zeros((len(paths), m), dtype=np.int64)
    for k, p in enumerate(paths):
        for e in p.edges:
            mat[k, e] += 1
    return mat


def _combination_savings(instance, paths, objective_edges, cap, collect):
    m = instance.m
    radices = [len(p) for p in paths]
    total = math.prod(radices)
    if total > cap:
        raise PathExplosion(cap)
    weights = np.array(instance.graph.weights, dtype=np.int64)
    if objective_edges is not None:
        mask = np.zeros(m, dtype=np.int64)
        mask[list(objective_edges)] = 1
        weights = weights * mask
    mats = [_incidence(p, m) for p in paths]
    # mixed radix, first pair most significant -> index order is lexicographic
    strides = []
    acc = 1
    for r in reversed(radices):
        strides.append(acc)
        acc *= r
    strides.reverse()

    best_val, best_idx, optima, overflow = None, None, [], False
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        counts = np.zeros((len(idx), m), dtype=np.int64)
        for mat, stride, r in zip(mats, strides, radices):
            counts += mat[(idx // stride) % r]
        vals = ((counts - (counts > 0)) * weights).sum(axis=1)
        k = int(np.argmax(vals))
        v = int(vals[k])
        if best_val is None or v > best_val:
            best_val, best_idx = v, int(idx[k])
            optima, overflow = [], False
        if collect and v == best_val and not overflow:
            hits = idx[vals == best_val]
            if len(optima) + len(hits) > MAX_OPTIMA:
                optima, overflow = [], True
            else:
                optima.extend(int(h) for h in hits)
    decode = lambda code: tuple((code // s) % r for s, r in zip(strides, radices))
    found = None if (not collect or overflow) else [decode(c) for c in optima]
    return best_val, decode(best_idx), total, found


def brute_force_optimum(instance: Instance, cap: int = DEFAULT_CAP, *,
                        objective_edges: Iterable[int] | None = None,
                        collect_optima: bool = False,
                        dags: Sequence[ShortestPathDag] | None = None) -> OracleResult:
    """Exact maximum savings over all per-pair shortest-path selections.

    Ties go to the lexicographically smallest path-index vector.  With
    ``objective_edges`` only those edges contribute savings.  With
    ``collect_optima`` every optimal selection is kept, unless there are
    more than ``MAX_OPTIMA`` of them (then ``optima`` is ``None``).
    """
    dags = dags or build_local_graphs(instance)
    paths = [enumerate_shortest_paths(d, cap) for d in dags]
    objective_edges = None if objective_edges is None else frozenset(objective_edges)
    if not paths:
        sol = solution_from_paths(instance, {})
        return OracleResult(0, (), [], sol, 1, [()] if collect_optima else None)
    best, choice, examined, optima = _combination_savings(instance, paths, objective_edges, cap, collect_optima)
    chosen = {pair: paths[i][k] for i, (pair, k) in enumerate(zip(instance.pairs, choice))}
    sol = solution_from_paths(instance, chosen)
    if objective_edges is None:
        assert sol.objective == best
    return OracleResult(best, choice, paths, sol, examined, optima)


def selection_savings(instance: Instance, selection: Sequence[Path], edges: Iterable[int] | None = None) -> int:
    counts: dict[int, int] = {}
    for p in selection:
        for e in p.edges:
            counts[e] = counts.get(e, 0) + 1
    keep = None if edges is None else set(edges)
    w = instance.graph.weights
    return sum((k - 1) * w[e] for e, k in counts.items() if keep is None or e in keep)


def classify_dominance(instance: Instance, oracle: OracleResult | None = None,
                       profile: ThicknessProfile | None = None, cap: int = DEFAULT_CAP) -> str:
    """``"thick-dominant"``, ``"thin-dominant"`` or ``"unknown"`` (too many optima)."""
    if oracle is None or oracle.optima is None:
        oracle = brute_force_optimum(instance, cap, collect_optima=True)
    if oracle.optima is None:
        return "unknown"
    profile = profile or classify_edges(instance)
    bound = oracle.objective / instance.m ** instance.epsilon
    for choice in oracle.optima:
        thick_part = selection_savings(instance, oracle.selection(choice), profile.thick)
        if thick_part > bound:
            return "thick-dominant"
    return "thin-dominant"


def thin_optimum(instance: Instance, profile: ThicknessProfile | None = None, cap: int = DEFAULT_CAP) -> OracleResult:
    """Optimum of the integer program with savings counted on thin edges only."""
    profile = profile or classify_edges(instance)
    return brute_force_optimum(instance, cap, objective_edges=profile.thin)


def kept_thin_savings(instance: Instance, profile: ThicknessProfile, selection: Sequence[Path]) -> int:
    """Thin savings of ``selection`` after dropping every light pair (``b < sqrt(m)``)."""
    kept = [p for i, p in enumerate(selection) if not profile.is_light_pair(i)]
    return selection_savings(instance, kept, profile.thin)


def classify_lightness(instance: Instance, thin_oracle: OracleResult | None = None,
                       profile: ThicknessProfile | None = None, cap: int = DEFAULT_CAP) -> str:
    """``"light"`` if dropping light pairs leaves at most ``(1 - m^-eps)`` of the thin optimum."""
    profile = profile or classify_edges(instance)
    thin_oracle = thin_oracle or thin_optimum(instance, profile, cap)
    kept = kept_thin_savings(instance, profile, thin_oracle.selection())
    limit = (1 - instance.m ** -instance.epsilon) * thin_oracle.objective
    return "light" if kept <= limit else "heavy"
