"""Centric-path dynamic programming for instances whose savings sit on thick edges."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .dag import ShortestPathDag, build_local_graphs, max_weight_path
from .graph import Instance, Pair, Path
from .model import PreserverSolution, ThicknessProfile, classify_edges, solution_from_paths

__all__ = ["CentricPathChoice", "max_weight_path", "choose_centric_path", "run_algorithm1", "overlap_is_contiguous"]

log = logging.getLogger(__name__)


@dataclass
class CentricPathChoice:
    pair: Pair
    path: Path
    weight: int
    pair_weights: list[int]  # best weight per pair, aligned with instance.pairs


def choose_centric_path(instance: Instance, dags: Sequence[ShortestPathDag], profile: ThicknessProfile) -> CentricPathChoice:
    """Heaviest local path under ``w(e) = (v_e - 1) c(e)`` on thick edges, 0 on thin ones."""
    c = instance.graph.weights
    w = {e: (profile.multiplicity[e] - 1) * c[e] for e in profile.thick}
    best = None
    weights = []
    for i, dag in enumerate(dags):
        path, a = max_weight_path(dag, w)
        weights.append(a)
        if best is None or a > best[2]:
            best = (i, path, a)
    i, path, a = best
    return CentricPathChoice(instance.pairs[i], path, a, weights)


def overlap_is_contiguous(path: Path, centric: Path) -> bool:
    """Whether the shared edges form one run in both paths."""
    pos = {e: k for k, e in enumerate(centric.edges)}
    shared = [k for k, e in enumerate(path.edges) if e in pos]
    if not shared:
        return True
    if shared[-1] - shared[0] != len(shared) - 1:
        return False
    where = [pos[path.edges[k]] for k in shared]
    return where == list(range(where[0], where[0] + len(where)))


def run_algorithm1(instance: Instance, dags: Sequence[ShortestPathDag] | None = None,
                   profile: ThicknessProfile | None = None) -> PreserverSolution:
    dags = dags if dags is not None else build_local_graphs(instance)
    profile = profile or classify_edges(instance, dags)
    if not dags:
        return solution_from_paths(instance, {})
    centric = choose_centric_path(instance, dags, profile)
    c = instance.graph.weights
    on_centric = {e: c[e] for e in centric.path.edges}
    chosen: dict[Pair, Path] = {}
    split = []
    for pair, dag in zip(instance.pairs, dags):
        h, _ = max_weight_path(dag, on_centric)
        chosen[pair] = h
        if not overlap_is_contiguous(h, centric.path):
            split.append(pair)
    if split:
        log.info("non-contiguous overlap with the centric path for pairs %s", split)
    sol = solution_from_paths(instance, chosen)
    sol.meta.update(algorithm="thick", centric_pair=centric.pair, centric_weight=centric.weight,
                    noncontiguous=split)
    return sol
