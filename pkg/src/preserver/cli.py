"""``preserver`` command line.

Exit codes: 0 success, 2 an infeasible or inconsistent solution was detected, 1 any other error.
Set ``PRESERVER_LOG`` (e.g. ``DEBUG``) for log output on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import formats
from .bench import bench
from .errors import PreserverError, ValidationError
from .generators import gen_grid, gen_random
from .hardness import generate_cspdp, random_maxrep
from .model import PreserverSolution, savings_report, verify_feasible
from .oracle import DEFAULT_CAP
from .reduction import undirected_to_directed
from .solve import ALGORITHMS, solve

log = logging.getLogger("preserver")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        formats.write_text(path, text)


def _cmd_gen(args) -> int:
    if args.kind == "random":
        inst = gen_random(args.n, args.m, args.p, (args.wmin, args.wmax), args.seed,
                          directed=not args.undirected, epsilon=args.epsilon)
    elif args.kind == "grid":
        inst = gen_grid(args.rows, args.cols, args.p, args.seed, (args.wmin, args.wmax), epsilon=args.epsilon)
    else:
        if args.source:
            maxrep = formats.parse_maxrep_text(formats.read_text(args.source))
        else:
            maxrep = random_maxrep(args.k, args.part_size, args.density, args.seed)
        inst, layout = generate_cspdp(maxrep, args.epsilon)
        if args.layout:
            formats.write_text(args.layout, formats.format_layout(layout))
    _emit(formats.format_instance(inst), args.output)
    return EXIT_OK


def _cmd_reduce(args) -> int:
    inst = formats.parse_instance(args.instance)
    reduced, rmap = undirected_to_directed(inst)
    _emit(formats.format_instance(reduced), args.output)
    if args.map:
        formats.write_text(args.map, formats.format_map(rmap))
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = formats.parse_instance(args.instance, args.epsilon)
    sol, trace = solve(inst, args.alg, trials=args.trials, seed=args.seed, cap=args.cap)
    feasible = verify_feasible(inst, sol.edges).feasible
    _emit(formats.format_solution(inst, sol, algorithm=args.alg, seed=args.seed, trials=args.trials,
                                  feasible=feasible), args.output)
    if args.trace:
        records = trace.records() if trace is not None else []
        formats.write_text(args.trace, "".join(json.dumps(r) + "\n" for r in records))
    if not feasible:
        log.error("solver produced an infeasible subgraph")
        return EXIT_INFEASIBLE
    return EXIT_OK


def verify_solution_file(inst, solfile: formats.SolutionFile) -> list[str]:
    """Problems found when re-checking a solution from scratch; empty means valid."""
    if solfile.instance_hash != formats.instance_hash(inst):
        raise ValidationError("solution was written for a different instance")
    problems = []
    g = inst.graph
    if any(not 0 <= e < g.m for e in solfile.edges):
        raise ValidationError("solution names an edge outside the instance")
    verdict = verify_feasible(inst, solfile.edges)
    if not verdict.feasible:
        problems.append(f"distances not preserved for {verdict.violations}")
    sol = PreserverSolution(frozenset(solfile.edges))
    upper = sum(inst.distance(s, t) for s, t in inst.pairs)
    cost = g.cost(sol.edges)
    for name, stated, actual in (("U", solfile.upper_bound, upper), ("cost", solfile.cost, cost),
                                 ("objective", solfile.objective, upper - cost)):
        if stated != actual:
            problems.append(f"stated {name} {stated} but recomputed {actual}")
    if solfile.paths:
        try:
            sol.witnesses = {pair: formats.path_from_nodes(inst, sol.edges, nodes)
                             for pair, nodes in solfile.paths.items()}
            savings_report(inst, sol)
        except PreserverError as exc:
            problems.append(f"witness paths rejected: {exc}")
    return problems


def _cmd_verify(args) -> int:
    inst = formats.parse_instance(args.instance)
    problems = verify_solution_file(inst, formats.parse_solution(args.solution))
    for p in problems:
        print(p)
    if problems:
        return EXIT_INFEASIBLE
    print("ok")
    return EXIT_OK


def _read_manifest(path: str) -> list[str]:
    base = os.path.dirname(os.path.abspath(path))
    out = []
    for line in formats.read_text(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line if os.path.isabs(line) else os.path.join(base, line))
    return out


def _cmd_bench(args) -> int:
    algorithms = [a.strip() for a in args.alg.split(",") if a.strip()]
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValidationError(f"unknown algorithm {a!r}")
    instances = [(p, formats.parse_instance(p, args.epsilon)) for p in _read_manifest(args.manifest)]
    report = bench(instances, algorithms, seed=args.seed, trials=args.trials,
                   oracle_cap=args.oracle_cap or None, jobs=args.jobs)
    _emit(report.to_jsonl(), args.output)
    return EXIT_INFEASIBLE if any(r.feasible is False for r in report.rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="preserver", description="Cost sharing pairwise distance preservers.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance")
    gsub = gen.add_subparsers(dest="kind", required=True)
    r = gsub.add_parser("random")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--p", type=int, required=True)
    r.add_argument("--wmin", type=int, default=1)
    r.add_argument("--wmax", type=int, default=10)
    r.add_argument("--undirected", action="store_true")
    gr = gsub.add_parser("grid")
    gr.add_argument("--rows", type=int, required=True)
    gr.add_argument("--cols", type=int, required=True)
    gr.add_argument("--p", type=int, required=True)
    gr.add_argument("--wmin", type=int, default=1)
    gr.add_argument("--wmax", type=int, default=1)
    mr = gsub.add_parser("maxrep")
    mr.add_argument("--from", dest="source", help="MAX-REP file ('maxrep <k> <part_size>' then 'e <a> <b>')")
    mr.add_argument("--k", type=int, default=2)
    mr.add_argument("--part-size", type=int, default=2)
    mr.add_argument("--density", type=float, default=0.5)
    mr.add_argument("--layout", help="write the node-role sidecar here")
    for p in (r, gr, mr):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--epsilon", type=float, default=0.5)
        p.add_argument("-o", "--output")

    red = sub.add_parser("reduce", help="undirected to directed reduction")
    red.add_argument("instance")
    red.add_argument("-o", "--output")
    red.add_argument("--map", help="write 'orig_edge entry exit mid_edge' lines here")

    so = sub.add_parser("solve", help="solve an instance")
    so.add_argument("instance")
    so.add_argument("--alg", choices=ALGORITHMS, default="main")
    so.add_argument("--epsilon", type=float, default=0.5)
    so.add_argument("--trials", type=int, default=32)
    so.add_argument("--seed", type=int, default=0)
    so.add_argument("--cap", type=int, default=DEFAULT_CAP, help="oracle path-product cap")
    so.add_argument("--trace", help="write per-iteration JSON lines here")
    so.add_argument("-o", "--output")

    ve = sub.add_parser("verify", help="re-check a solution file")
    ve.add_argument("instance")
    ve.add_argument("solution")

    be = sub.add_parser("bench", help="run algorithms over a manifest of instance files")
    be.add_argument("manifest")
    be.add_argument("--alg", default="thick,thin,main")
    be.add_argument("--epsilon", type=float, default=0.5)
    be.add_argument("--trials", type=int, default=32)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP, help="0 disables the oracle")
    be.add_argument("--jobs", type=int, default=1)
    be.add_argument("-o", "--output")
    return parser


COMMANDS = {"gen": _cmd_gen, "reduce": _cmd_reduce, "solve": _cmd_solve, "verify": _cmd_verify, "bench": _cmd_bench}


def main(argv: list[str] | None = None) -> int:
    level = getattr(logging, os.environ.get("PRESERVER_LOG", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (PreserverError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
