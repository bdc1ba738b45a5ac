"""Cost sharing pairwise distance preservers: exact oracle, approximation algorithms and tooling."""

from .errors import PreserverError
from .graph import Instance, Path, WeightedGraph
from .model import PreserverSolution, classify_edges, savings_report, verify_feasible
from .oracle import brute_force_optimum
from .reduction import map_solution_back, undirected_to_directed
from .solve import ALGORITHMS, solve

__all__ = [
    "ALGORITHMS",
    "Instance",
    "Path",
    "PreserverError",
    "PreserverSolution",
    "WeightedGraph",
    "brute_force_optimum",
    "classify_edges",
    "map_solution_back",
    "savings_report",
    "solve",
    "undirected_to_directed",
    "verify_feasible",
]
