"""LP relaxation over thin edges, solution mixing, path decomposition and rounding.

Savings of a fractional solution on an edge are
``(sum_pairs x_e - max_pairs x_e) * c(e)``; the relaxation only counts them on
*qualifying* edges: thin edges lying in the local graph of some light pair
(fewer than ``sqrt(m)`` thin edges).
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .dag import ShortestPathDag, build_local_graphs, extend_arc, lexicographic_path
from .errors import DimensionMismatch, LpInfeasible, LpNumericalFailure, NonConservingInput, ValidationError
from .graph import Instance, Path
from .model import PreserverSolution, ThicknessProfile, classify_edges, solution_from_paths

log = logging.getLogger(__name__)

FLOW_TOL = 1e-9
_ZERO = 1e-10

Key = tuple[int, int]  # (pair index, edge id)


@dataclass
class FractionalSolution:
    x: dict[Key, float]
    y: dict[int, float]
    objective: float
    npairs: int
    qualifying: frozenset[int]

    def value(self, pair_index: int, eid: int) -> float:
        return self.x.get((pair_index, eid), 0.0)

    def by_edge(self) -> dict[int, list[float]]:
        out: dict[int, list[float]] = defaultdict(list)
        for (_, e), v in sorted(self.x.items()):
            out[e].append(v)
        return out


@dataclass
class PathFlow:
    flows: list[list[tuple[Path, float]]]  # per pair index

    def link_flows(self) -> dict[Key, float]:
        x: dict[Key, float] = defaultdict(float)
        for i, paths in enumerate(self.flows):
            for p, f in paths:
                for e in p.edges:
                    x[(i, e)] += f
        return dict(x)

    def path_count(self) -> int:
        return sum(len(p) for p in self.flows)


@dataclass
class RestrictedLp:
    instance: Instance
    dags: Sequence[ShortestPathDag]
    profile: ThicknessProfile
    qualifying: frozenset[int]
    columns: list[Key]  # x columns; y columns follow, one per qualifying edge
    y_columns: list[int]
    objective: np.ndarray  # maximisation coefficients
    a_eq: object
    b_eq: np.ndarray
    a_ub: object
    b_ub: np.ndarray
    meta: dict = field(default_factory=dict)


def edge_savings(x: Mapping[Key, float], weights: Sequence[int], edges) -> dict[int, float]:
    """``(sum x - max x) * c(e)`` for each edge in ``edges``."""
    acc: dict[int, list[float]] = defaultdict(list)
    for (_, e), v in x.items():
        if e in edges:
            acc[e].append(v)
    return {e: (math.fsum(acc[e]) - max(acc[e], default=0.0)) * weights[e] for e in sorted(edges)}


def _make_solution(x: dict[Key, float], npairs: int, qualifying, weights) -> FractionalSolution:
    y: dict[int, float] = {}
    for (_, e), v in x.items():
        y[e] = max(y.get(e, 0.0), v)
    objective = math.fsum(edge_savings(x, weights, qualifying).values())
    return FractionalSolution(x, y, objective, npairs, frozenset(qualifying))


def build_restricted_lp(instance: Instance, profile: ThicknessProfile | None = None,
                        dags: Sequence[ShortestPathDag] | None = None) -> RestrictedLp:
    if not instance.graph.directed:
        raise ValidationError("the LP works on directed instances; reduce undirected ones first")
    dags = dags if dags is not None else build_local_graphs(instance)
    profile = profile or classify_edges(instance, dags)
    qualifying = profile.qualifying_edges(dags)
    c = instance.graph.weights

    columns: list[Key] = []
    col_of: dict[Key, int] = {}
    for i, dag in enumerate(dags):
        for eid, _, _ in dag.arcs:
            col_of[(i, eid)] = len(columns)
            columns.append((i, eid))
    y_columns = sorted(qualifying)
    y_of = {e: len(columns) + k for k, e in enumerate(y_columns)}
    nvars = len(columns) + len(y_columns)

    obj = np.zeros(nvars)
    for k, (_, e) in enumerate(columns):
        if e in qualifying:
            obj[k] = c[e]
    for e, k in y_of.items():
        obj[k] = -c[e]

    # conservation: inflow - outflow = -1 at s, +1 at t, 0 elsewhere
    rows, cols, vals, rhs = [], [], [], []
    r = 0
    for i, dag in enumerate(dags):
        row_of = {v: r + k for k, v in enumerate(sorted(dag.nodes))}
        for eid, u, v in dag.arcs:
            k = col_of[(i, eid)]
            rows += [row_of[v], row_of[u]]
            cols += [k, k]
            vals += [1.0, -1.0]
        for v in sorted(dag.nodes):
            rhs.append(-1.0 if v == dag.source else 1.0 if v == dag.target else 0.0)
        r += len(row_of)
    a_eq = coo_matrix((vals, (rows, cols)), shape=(r, nvars)).tocsr()

    rows, cols, vals = [], [], []
    r = 0
    for k, (_, e) in enumerate(columns):
        if e in y_of:
            rows += [r, r]
            cols += [k, y_of[e]]
            vals += [1.0, -1.0]
            r += 1
    a_ub = coo_matrix((vals, (rows, cols)), shape=(r, nvars)).tocsr()
    return RestrictedLp(instance, dags, profile, qualifying, columns, y_columns, obj,
                        a_eq, np.array(rhs), a_ub, np.zeros(r))


def solve_lp(lp: RestrictedLp) -> FractionalSolution:
    """Dual simplex optimum, clamped to [0, 1], with ``y`` reset to the per-edge max of ``x``."""
    res = linprog(-lp.objective, A_ub=lp.a_ub if lp.a_ub.shape[0] else None,
                  b_ub=lp.b_ub if lp.a_ub.shape[0] else None,
                  A_eq=lp.a_eq, b_eq=lp.b_eq, bounds=(0.0, 1.0), method="highs-ds")
    if res.status == 2:
        raise LpInfeasible(res.message)
    if res.status != 0:
        raise LpNumericalFailure(res.message)
    values = np.clip(res.x[:len(lp.columns)], 0.0, 1.0)
    x = {key: float(v) for key, v in zip(lp.columns, values) if v > _ZERO}
    sol = _make_solution(x, len(lp.dags), lp.qualifying, lp.instance.graph.weights)
    lp_value = -float(res.fun)
    if abs(sol.objective - lp_value) > 1e-7 * max(1.0, abs(lp_value)):
        raise LpNumericalFailure(f"post-processed objective {sol.objective} differs from LP value {lp_value}")
    return sol


def uniform_extension_solution(instance: Instance, profile: ThicknessProfile,
                               dags: Sequence[ShortestPathDag]) -> tuple[FractionalSolution, PathFlow]:
    """Spread each light pair's unit flow evenly over one path per thin edge.

    A light pair with ``b`` thin edges extends every thin edge to a full
    shortest path and gives it flow ``1/b``; every other pair routes its unit
    on the lexicographically smallest shortest path.
    """
    flows = []
    for i, dag in enumerate(dags):
        b = profile.thin_count[i]
        paths: dict[Path, float] = {}
        if profile.is_light_pair(i) and b > 0:
            for arc in dag.arcs:
                if arc[0] in profile.thin:
                    p = extend_arc(dag, arc)
                    paths[p] = paths.get(p, 0.0) + 1.0 / b
        else:
            paths[lexicographic_path(dag)] = 1.0
        flows.append(list(paths.items()))
    flow = PathFlow(flows)
    qualifying = profile.qualifying_edges(dags)
    return _make_solution(flow.link_flows(), len(dags), qualifying, instance.graph.weights), flow


def mix_solutions(xstar: FractionalSolution, xone: FractionalSolution, weights: Sequence[int]) -> FractionalSolution:
    if xstar.npairs != xone.npairs or xstar.qualifying != xone.qualifying:
        raise DimensionMismatch("solutions belong to different LPs")
    keys = set(xstar.x) | set(xone.x)
    x = {k: 0.5 * (xstar.x.get(k, 0.0) + xone.x.get(k, 0.0)) for k in sorted(keys)}
    return _make_solution(x, xstar.npairs, xstar.qualifying, weights)


def conservation_residual(x: Mapping[Key, float], dags: Sequence[ShortestPathDag]) -> float:
    worst = 0.0
    for i, dag in enumerate(dags):
        net = defaultdict(float)
        for eid, u, v in dag.arcs:
            val = x.get((i, eid), 0.0)
            net[v] += val
            net[u] -= val
        for v in dag.nodes:
            d = -1.0 if v == dag.source else 1.0 if v == dag.target else 0.0
            worst = max(worst, abs(net[v] - d))
    return worst


def _walk(residual, start, goal, adj):
    """Follow positive-residual arcs from ``start`` until ``goal``.

    Returns ``("path", nodes, edges)``, ``("cycle", edges)`` when the walk
    closes a loop, or ``("dead", None)`` at a node with no positive arc.
    """
    nodes, edges, where = [start], [], {start: 0}
    u = start
    while u != goal:
        step = next(((v, e) for v, e in adj[u] if residual.get(e, 0.0) > _ZERO), None)
        if step is None:
            return ("dead", None)
        v, e = step
        if v in where:
            return ("cycle", edges[where[v]:] + [e])
        where[v] = len(nodes)
        nodes.append(v)
        edges.append(e)
        u = v
    return ("path", nodes, edges)


def path_decompose(x: FractionalSolution, dags: Sequence[ShortestPathDag]) -> PathFlow:
    """Peel paths through the minimum-flow edge until each pair's flow is used up.

    Flow on zero-weight cycles carries no cost and is cancelled rather than
    assigned to a path.
    """
    if x.npairs != len(dags):
        raise DimensionMismatch("solution and local graphs disagree on the pair count")
    worst = conservation_residual(x.x, dags)
    if worst > 1e-6:
        raise NonConservingInput(f"flow conservation violated by {worst:.3g}")
    flows = []
    for i, dag in enumerate(dags):
        residual = {e: v for (pi, e), v in x.x.items() if pi == i and v > _ZERO}
        ends = {eid: (u, v) for eid, u, v in dag.arcs}
        paths: list[tuple[Path, float]] = []
        budget = len(dag.arcs) + 1
        while residual and budget > 0:
            budget -= 1
            e = min(residual, key=lambda k: (residual[k], k))
            amount = residual[e]
            u, v = ends[e]
            back = _walk(residual, u, dag.source, dag.pred)
            fwd = _walk(residual, v, dag.target, dag.succ)
            for part in (back, fwd):
                if part[0] == "cycle":
                    cyc = part[1]
                    low = min(residual[c] for c in cyc)
                    for c in cyc:
                        residual[c] -= low
                        if residual[c] <= _ZERO:
                            del residual[c]
                    budget += 1
                    break
            else:
                if back[0] == "dead" or fwd[0] == "dead":
                    # numerical crumbs only; conservation was checked above
                    del residual[e]
                    continue
                nodes = back[1][::-1] + fwd[1]
                edges = back[2][::-1] + [e] + fwd[2]
                for g in edges:
                    residual[g] -= amount
                    if residual[g] <= _ZERO:
                        del residual[g]
                paths.append((Path(tuple(nodes), tuple(edges)), amount))
        total = math.fsum(f for _, f in paths)
        if not paths or abs(total - 1.0) > 1e-6:
            raise NonConservingInput(f"pair {i} decomposes into total flow {total}")
        flows.append([(p, f / total) for p, f in paths])
    return PathFlow(flows)


def expected_savings(x: FractionalSolution | PathFlow | Mapping[Key, float], instance: Instance,
                     qualifying) -> tuple[dict[int, float], float]:
    """Expected restricted savings when each pair draws one path independently.

    Edge ``e`` is used by pair ``p`` with probability ``x_e^p``, so its
    expected savings are ``(sum x - (1 - prod(1 - x))) * c(e)``.
    """
    if isinstance(x, PathFlow):
        x = x.link_flows()
    elif isinstance(x, FractionalSolution):
        x = x.x
    acc: dict[int, list[float]] = defaultdict(list)
    for (_, e), v in sorted(x.items()):
        if e in qualifying:
            acc[e].append(v)
    c = instance.graph.weights
    per_edge = {}
    for e in sorted(qualifying):
        vals = acc.get(e, [])
        per_edge[e] = (math.fsum(vals) - (1.0 - math.prod(1.0 - v for v in vals))) * c[e]
    return per_edge, math.fsum(per_edge.values())


def sample_paths(flow: PathFlow, rng: np.random.Generator) -> list[Path]:
    out = []
    for paths in flow.flows:
        cum = np.cumsum([f for _, f in paths])
        k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        out.append(paths[min(k, len(paths) - 1)][0])
    return out


def monte_carlo_savings(flow: PathFlow, instance: Instance, qualifying, samples: int,
                        seed: int = 0) -> tuple[float, float]:
    """Sample mean and standard error of realised restricted savings."""
    rng = np.random.default_rng(seed)
    cols = sorted(qualifying)
    col = {e: k for k, e in enumerate(cols)}
    c = np.array([instance.graph.weights[e] for e in cols], dtype=np.float64)
    counts = np.zeros((samples, len(cols)), dtype=np.int32)
    for paths in flow.flows:
        inc = np.zeros((len(paths), len(cols)), dtype=np.int32)
        for k, (p, _) in enumerate(paths):
            for e in p.edges:
                if e in col:
                    inc[k, col[e]] += 1
        cum = np.cumsum([f for _, f in paths])
        idx = np.minimum(np.searchsorted(cum, rng.random(samples) * cum[-1], side="right"), len(paths) - 1)
        counts += inc[idx]
    realised = ((counts - (counts > 0)) * c).sum(axis=1)
    return float(realised.mean()), float(realised.std(ddof=1) / math.sqrt(samples))


@dataclass
class RoundingState:
    lp: RestrictedLp
    xstar: FractionalSolution
    xone: FractionalSolution
    xtwo: FractionalSolution
    flow: PathFlow


def prepare_rounding(instance: Instance, dags: Sequence[ShortestPathDag] | None = None,
                     profile: ThicknessProfile | None = None) -> RoundingState:
    """Everything before sampling: restricted LP, mixing with the uniform solution, decomposition."""
    dags = dags if dags is not None else build_local_graphs(instance)
    profile = profile or classify_edges(instance, dags)
    lp = build_restricted_lp(instance, profile, dags)
    xstar = solve_lp(lp)
    xone, _ = uniform_extension_solution(instance, profile, dags)
    xtwo = mix_solutions(xstar, xone, instance.graph.weights)
    flow = path_decompose(xtwo, dags)
    return RoundingState(lp, xstar, xone, xtwo, flow)


def run_algorithm2(instance: Instance, trials: int = 32, seed: int | Sequence[int] = 0,
                   dags: Sequence[ShortestPathDag] | None = None,
                   profile: ThicknessProfile | None = None) -> PreserverSolution:
    """Randomised rounding of the mixed LP solution; the best of ``trials`` draws wins."""
    if not instance.pairs:
        return solution_from_paths(instance, {})
    dags = dags if dags is not None else build_local_graphs(instance)
    state = prepare_rounding(instance, dags, profile)
    base = [seed] if isinstance(seed, int) else list(seed)
    best = None
    for k in range(max(1, trials)):
        rng = np.random.default_rng(base + [k])
        chosen = dict(zip(instance.pairs, sample_paths(state.flow, rng)))
        sol = solution_from_paths(instance, chosen)
        key = (-sol.objective, tuple(sorted(sol.edges)))
        if best is None or key < best[0]:
            best = (key, k, sol)
    _, k, sol = best
    _, expected = expected_savings(state.flow, instance, state.lp.qualifying)
    sol.meta.update(algorithm="thin", lp_objective=state.xstar.objective,
                    mixed_objective=state.xtwo.objective, expected_savings=expected, best_trial=k)
    return sol
