"""Iterative main loop: best of both algorithms, prune light pairs, repeat, patch."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from .dag import build_local_graphs, lexicographic_path
from .graph import Instance, Pair
from .lp import run_algorithm2
from .model import PreserverSolution, ThicknessProfile, classify_edges, finalize, verify_feasible
from .thick import run_algorithm1


def iteration_cap(epsilon: float) -> int:
    return math.ceil(2 / epsilon) + 1


@dataclass
class IterationRecord:
    iteration: int
    pairs: int
    alg1_objective: int
    alg2_objective: int
    alg1_patched: int
    alg2_patched: int
    removed: int
    lower_bound: int
    best: str


@dataclass
class MainTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    patch: list[Pair] = field(default_factory=list)
    exit_reason: str = ""
    final_objective: int = 0

    def records(self) -> list[dict]:
        rows = [dict(kind="iteration", **asdict(r)) for r in self.iterations]
        rows.append(dict(kind="final", patch=[list(p) for p in self.patch], exit_reason=self.exit_reason,
                         final_objective=self.final_objective))
        return rows


def prune_pairs(instance: Instance, profile: ThicknessProfile) -> list[Pair]:
    """Keep the pairs with at least ``sqrt(m)`` thin edges."""
    return [p for i, p in enumerate(instance.pairs) if not profile.is_light_pair(i)]


def patch_solution(original: Instance, solution: PreserverSolution, dags=None) -> tuple[PreserverSolution, list[Pair]]:
    """Add a shortest path for every original pair whose distance ``H`` stretches."""
    dags = dags if dags is not None else build_local_graphs(original)
    missing = verify_feasible(original, solution.edges).violations
    edges = set(solution.edges)
    witnesses = dict(solution.witnesses or {})
    index = {p: i for i, p in enumerate(original.pairs)}
    for pair in missing:
        path = lexicographic_path(dags[index[pair]])
        edges.update(path.edges)
        witnesses[pair] = path
    return finalize(original, edges, witnesses, dags), missing


def run_main(instance: Instance, trials: int = 32, seed: int = 0) -> tuple[PreserverSolution, MainTrace]:
    trace = MainTrace()
    original_dags = build_local_graphs(instance)
    current = instance
    best: PreserverSolution | None = None
    lower = 0
    cap = iteration_cap(instance.epsilon)
    trace.exit_reason = "iteration cap"
    for it in range(cap):
        if not current.pairs:
            trace.exit_reason = "no pairs left"
            break
        dags = build_local_graphs(current)
        profile = classify_edges(current, dags)
        found = []
        for name, sol in (("thick", run_algorithm1(current, dags, profile)),
                          ("thin", run_algorithm2(current, trials, (seed, it), dags, profile))):
            patched, _ = patch_solution(instance, sol, original_dags)
            found.append((name, sol, patched.objective))
        chosen = "previous"
        for name, sol, value in found:
            if best is None or value >= lower:
                best, lower, chosen = sol, value, name
        kept = prune_pairs(current, profile)
        removed = len(current.pairs) - len(kept)
        trace.iterations.append(IterationRecord(it, len(current.pairs), found[0][1].objective,
                                                found[1][1].objective, found[0][2], found[1][2],
                                                removed, lower, chosen))
        if removed == 0:
            trace.exit_reason = "no pair pruned"
            break
        current = current.with_pairs(kept)
    else:
        if not current.pairs:
            trace.exit_reason = "no pairs left"

    if best is None:
        best = PreserverSolution(frozenset(), {})
    final, missing = patch_solution(instance, best, original_dags)
    trace.patch = missing
    trace.final_objective = final.objective
    final.meta.update(algorithm="main", iterations=len(trace.iterations), patched_pairs=len(missing))
    return final, trace
