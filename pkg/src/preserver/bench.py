"""Batch runner: every algorithm on every instance, with feasibility and oracle ratios."""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .graph import Instance
from .main_algo import iteration_cap
from .model import verify_feasible
from .oracle import DEFAULT_CAP, brute_force_optimum
from .solve import solve

log = logging.getLogger(__name__)


@dataclass
class BenchRow:
    instance: str
    n: int
    m: int
    pairs: int
    epsilon: float
    algorithm: str
    objective: int | None = None
    feasible: bool | None = None
    oracle: int | None = None
    ratio: float | None = None
    target_main: float | None = None   # oracle-scaled lower bound for the iterated algorithm
    target_thick: float | None = None  # oracle / m^(1/2 + 2 eps)
    within_bound: bool | None = None
    seconds: float = 0.0
    error: str | None = None


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(r)) + "\n" for r in self.rows)

    def violations(self) -> list[BenchRow]:
        return [r for r in self.rows if r.error is None and (r.feasible is False or r.within_bound is False)]


def main_target(z: float, m: int, epsilon: float) -> float:
    return (1 - m ** -epsilon) ** iteration_cap(epsilon) * z / (4 * m ** (0.5 + 2 * epsilon))


def thick_target(z: float, m: int, epsilon: float) -> float:
    return z / m ** (0.5 + 2 * epsilon)


def _run_instance(job) -> list[BenchRow]:
    name, instance, algorithms, seed, trials, oracle_cap = job
    g = instance.graph
    oracle = None
    if oracle_cap:
        try:
            oracle = brute_force_optimum(instance, oracle_cap).objective
        except Exception as exc:  # oracle is optional per row
            log.info("oracle skipped for %s: %s", name, exc)
    rows = []
    for alg in algorithms:
        row = BenchRow(name, g.n, g.m, len(instance.pairs), instance.epsilon, alg, oracle=oracle)
        start = time.perf_counter()
        try:
            sol, _ = solve(instance, alg, trials=trials, seed=seed)
            row.objective = sol.objective
            row.feasible = verify_feasible(instance, sol.edges).feasible
            if oracle is not None:
                row.ratio = oracle / sol.objective if sol.objective > 0 else (1.0 if oracle == 0 else math.inf)
                row.target_main = main_target(oracle, g.m, instance.epsilon)
                row.target_thick = thick_target(oracle, g.m, instance.epsilon)
                row.within_bound = sol.objective <= oracle and (alg != "main" or sol.objective >= row.target_main - 1e-9)
        except Exception as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        row.seconds = round(time.perf_counter() - start, 6)
        rows.append(row)
    return rows


def bench(instances: Sequence[tuple[str, Instance]], algorithms: Sequence[str] = ("thick", "thin", "main"),
          seed: int = 0, trials: int = 32, oracle_cap: int | None = DEFAULT_CAP, jobs: int = 1) -> BenchReport:
    """One row per (instance, algorithm), in input order; failures land in ``row.error``."""
    work = [(name, inst, tuple(algorithms), seed, trials, oracle_cap) for name, inst in instances]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            chunks = list(pool.map(_run_instance, work))
    else:
        chunks = [_run_instance(w) for w in work]
    return BenchReport([row for chunk in chunks for row in chunk])
