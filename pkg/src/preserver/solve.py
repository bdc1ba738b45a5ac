"""Single entry point that runs any algorithm on any instance."""

from __future__ import annotations

from .graph import Instance
from .lp import run_algorithm2
from .main_algo import MainTrace, run_main
from .model import PreserverSolution
from .oracle import DEFAULT_CAP, brute_force_optimum
from .reduction import map_solution_back, undirected_to_directed
from .thick import run_algorithm1

ALGORITHMS = ("oracle", "thick", "thin", "main")


def solve(instance: Instance, algorithm: str = "main", *, trials: int = 32, seed: int = 0,
          cap: int = DEFAULT_CAP) -> tuple[PreserverSolution, MainTrace | None]:
    """Run ``algorithm``; approximation algorithms see undirected inputs through the reduction."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    instance.check_reachable()
    if algorithm == "oracle":
        result = brute_force_optimum(instance, cap)
        result.solution.meta.update(algorithm="oracle", examined=result.examined)
        return result.solution, None
    rmap = None
    work = instance
    if not instance.graph.directed:
        work, rmap = undirected_to_directed(instance)
    trace = None
    if algorithm == "thick":
        sol = run_algorithm1(work)
    elif algorithm == "thin":
        sol = run_algorithm2(work, trials, seed)
    else:
        sol, trace = run_main(work, trials, seed)
    if rmap is not None:
        sol = map_solution_back(rmap, sol)
    return sol, trace
