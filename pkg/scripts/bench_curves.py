"""Proof-search scaling curves: time and search size against formula size.

Sweeps random formulas of growing size over a list of logics and prints
one row per (logic, size) cell with throughput and search statistics for
the invertible mode, plus optional agreement timing for the backtracking
mode. All randomness flows from --seed, so rows are reproducible.

Usage:
    python3 scripts/bench_curves.py
    python3 scripts/bench_curves.py --logics E,MCN,END --sizes 5,15,25 --csv
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from nnml.formula import node_count
from nnml.gen import random_formula
from nnml.hypersequent import Hypersequent, Sequent
from nnml.logic import canonical_name, parse_logic_name
from nnml.search import BudgetExceeded, Proved, SearchStats, prove, prove_unkleened

COLUMNS = (
    "logic",
    "size",
    "count",
    "proved",
    "blown",
    "mean_ms",
    "p95_ms",
    "max_ms",
    "max_visited",
    "max_components",
    "unkleened_ms",
)


def sample(rng: random.Random, size: int):
    while True:
        f = random_formula(rng, max_nodes=size)
        if node_count(f) <= size:
            return f


def bench_cell(l, size: int, count: int, rng: random.Random, budget: int, both: bool) -> dict:
    formulas = [sample(rng, size) for _ in range(count)]
    times = []
    proved = blown = 0
    max_visited = max_components = 0
    for f in formulas:
        h = Hypersequent.of([Sequent.of(right=(f,))])
        stats = SearchStats()
        t0 = time.perf_counter()
        try:
            outcome = prove(h, l, budget=budget, stats=stats)
            proved += isinstance(outcome, Proved)
        except BudgetExceeded:
            blown += 1
        times.append(time.perf_counter() - t0)
        max_visited = max(max_visited, stats.visited)
        max_components = max(max_components, stats.max_components)
    unkleened_ms = ""
    if both:
        t0 = time.perf_counter()
        for f in formulas:
            h = Hypersequent.of([Sequent.of(right=(f,))])
            try:
                prove_unkleened(h, l, budget=budget)
            except BudgetExceeded:
                pass
        unkleened_ms = f"{(time.perf_counter() - t0) / count * 1000:.2f}"
    times_ms = sorted(t * 1000 for t in times)
    p95 = times_ms[min(len(times_ms) - 1, int(0.95 * len(times_ms)))]
    return {
        "logic": canonical_name(l),
        "size": size,
        "count": count,
        "proved": proved,
        "blown": blown,
        "mean_ms": f"{statistics.mean(times_ms):.2f}",
        "p95_ms": f"{p95:.2f}",
        "max_ms": f"{times_ms[-1]:.2f}",
        "max_visited": max_visited,
        "max_components": max_components,
        "unkleened_ms": unkleened_ms,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--logics", default="E,M,EC,MCN,EN,END2+", help="comma-separated logic names")
    ap.add_argument("--sizes", default="5,10,15,20,25", help="comma-separated formula sizes")
    ap.add_argument("--count", type=int, default=100, help="formulas per cell")
    ap.add_argument("--seed", default="bench-curves", help="seed for formula sampling")
    ap.add_argument("--budget", type=int, default=10**6, help="search node budget")
    ap.add_argument("--skip-unkleened", action="store_true", help="time the invertible mode only")
    ap.add_argument("--csv", action="store_true", help="emit CSV instead of an aligned table")
    args = ap.parse_args(argv)

    logics = [parse_logic_name(n.strip()) for n in args.logics.split(",") if n.strip()]
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rng = random.Random(args.seed)
    rows = [
        bench_cell(l, size, args.count, rng, args.budget, not args.skip_unkleened)
        for l in logics
        for size in sizes
    ]
    if args.csv:
        print(",".join(COLUMNS))
        for row in rows:
            print(",".join(str(row[c]) for c in COLUMNS))
    else:
        widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in COLUMNS}
        print("  ".join(c.ljust(widths[c]) for c in COLUMNS))
        for row in rows:
            print("  ".join(str(row[c]).ljust(widths[c]) for c in COLUMNS))
    return 0


if __name__ == "__main__":
    sys.exit(main())
