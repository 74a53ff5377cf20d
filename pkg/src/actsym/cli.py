"""Command line: ``actsym gen | solve | bench | summarize``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bench import read_csv, run, summarize, write_csv
from .engine import BEST_FIRST, DEPTH_FIRST, SolverConfig
from .instances import MKCS, MKP, MUCP, MkcsData, Problem, gen_mkp, gen_mucp, save
from .instances.mkcs import mycielski, path, petersen
from .instances.mkp import EQUAL_PROFIT, FREE_PROFIT, ITEM_CLASSES
from .model import FORMAT_VERSION
from .subsym import SETTINGS

GRAPHS = {"petersen": petersen, "myciel3": lambda: mycielski(3),
          "myciel4": lambda: mycielski(4), "path5": lambda: path(5)}


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time-limit", type=float, default=None,
                   help="seconds per solve (default 3600, or 7200 for MKCS)")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--eps-feas", type=float, default=1e-7)
    p.add_argument("--eps-opt", type=float, default=1e-7)
    p.add_argument("--eps-int", type=float, default=1e-6)
    p.add_argument("--node-selection", choices=(BEST_FIRST, DEPTH_FIRST), default=BEST_FIRST)
    p.add_argument("--seed", type=int, default=0, help="recorded for provenance only")
    p.add_argument("-k", "--colors", type=int, default=None,
                   help="number of colors for bare DIMACS instances")


def _config(args, setting: str = "no-sym") -> SolverConfig:
    return SolverConfig(setting=setting, time_limit_s=args.time_limit, node_limit=args.node_limit,
                        eps_feas=args.eps_feas, eps_opt=args.eps_opt, eps_int=args.eps_int,
                        node_selection=args.node_selection, random_seed=args.seed)


def _cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for s in range(args.seed, args.seed + args.count):
        if args.family == MKP:
            data = gen_mkp(s, args.m, args.n, args.item_class, Fraction(args.f), args.profit_mode)
            problem = Problem(MKP, data)
            params = dict(data.meta)
        elif args.family == MUCP:
            counts = [int(c) for c in args.types.split(",")]
            data = gen_mucp(s, args.periods, counts)
            problem = Problem(MUCP, data)
            params = dict(data.meta)
        else:
            graph = GRAPHS[args.graph]()
            problem = Problem(MKCS, MkcsData(graph, args.k, f"{graph.name}_k{args.k}"))
            params = {"generator": "builtin-graph", "graph": args.graph, "k": args.k}
        file = out / f"{problem.name}.json"
        save(problem, file)
        entries.append({"file": file.name, "name": problem.name, "params": params})
        if args.family == MKCS:
            break
    manifest = {"format_version": FORMAT_VERSION, "family": args.family,
                "rng": "numpy PCG64, SeedSequence(entropy=seed, spawn_key=(stream,))",
                "instances": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    print(f"wrote {len(entries)} instance(s) to {out}")
    return 0


def _cmd_solve(args) -> int:
    rows = run([args.instance], [args.setting], _config(args, args.setting), k=args.colors)
    row = rows[0]
    print(json.dumps(row, indent=1))
    return 0


def _cmd_bench(args) -> int:
    settings = args.settings.split(",") if args.settings else None
    rows = run(args.instances, settings, _config(args), jobs=args.jobs, k=args.colors)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


def _cmd_summarize(args) -> int:
    with open(args.csv, newline="") as fh:
        rows = read_csv(fh)
    bounds = [math.inf if b.strip() in ("inf", "infinity") else float(b)
              for b in args.classes.split(",")]
    settings = args.settings.split(",") if args.settings else None
    print(summarize(rows, bounds, args.shift, settings).format(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="actsym", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate instances and a manifest")
    g.add_argument("family", choices=(MKP, MUCP, MKCS))
    g.add_argument("--out", required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0, help="first seed")
    g.add_argument("--m", type=int, default=20, help="MKP items")
    g.add_argument("--n", type=int, default=4, help="MKP knapsacks")
    g.add_argument("--item-class", choices=ITEM_CLASSES, default="uncorrelated")
    g.add_argument("--f", default="1/2", help="symmetry factor, e.g. 1/2")
    g.add_argument("--profit-mode", choices=(EQUAL_PROFIT, FREE_PROFIT), default=EQUAL_PROFIT)
    g.add_argument("--periods", type=int, default=6, help="MUCP horizon")
    g.add_argument("--types", default="3,2", help="MUCP units per type, comma separated")
    g.add_argument("--graph", choices=sorted(GRAPHS), default="petersen")
    g.add_argument("-k", type=int, default=3, help="MKCS colors")
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    s.add_argument("--setting", choices=SETTINGS, default="act")
    _add_solver_flags(s)
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="solve instances under several settings, write CSV")
    b.add_argument("instances", nargs="+")
    b.add_argument("--settings", default=None,
                   help="comma separated; default depends on the problem family")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", default=None, help="CSV path (default: stdout)")
    _add_solver_flags(b)
    b.set_defaults(func=_cmd_bench)

    m = sub.add_parser("summarize", help="summary table from a bench CSV")
    m.add_argument("csv")
    m.add_argument("--classes", default="0,10,100,inf", help="class bounds in seconds")
    m.add_argument("--shift", type=float, default=1.0)
    m.add_argument("--settings", default=None)
    m.set_defaults(func=_cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
