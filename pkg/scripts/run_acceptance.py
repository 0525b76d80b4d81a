"""Run the full acceptance battery and print a pass/fail table.

Covers oracle equivalence on the small atlas and the seeded corpora, the
table-level audit, leaf initialization, the log bound, the apex reduction
identity, the binary-tree separation family, the series-rule terminal
check, and the scaling slopes. Everything is deterministic for a given
--seed.

Usage:
    python scripts/run_acceptance.py
    python scripts/run_acceptance.py --quick          # reduced corpora
    python scripts/run_acceptance.py --skip-bench
    python scripts/run_acceptance.py --json results.json
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path
from typing import Any, Callable

# Add src/ to import path
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cli import fit_slope
from config import load_config
from differential import (
    audit_tables,
    combine_series_literal,
    compare_instance,
    corpus,
    sp_instances,
)
from generators import gen_apex_binary_tree, gen_atlas, gen_bench
from graph import build_graph
from oracle import apex_construction, brute_ctw, brute_tw
from solver import TerminalMismatch, cap_for, ctw, leaf_table
from sptree import NotSeriesParallel, recognize_sp, sp_tree_for_edge


def check_oracle_equivalence(args) -> dict[str, Any]:
    graphs = [g for g in gen_atlas(6) if brute_tw(g).value <= 2]
    graphs += list(corpus("sp", args.sp_trials, 8, args.seed))
    graphs += list(corpus("tw2", args.tw2_trials, 8, args.seed))
    bad = [c for c in (compare_instance(g) for g in graphs) if not c.ok]
    return {"ok": not bad, "instances": len(graphs), "mismatches": len(bad)}


def check_tables(args) -> dict[str, Any]:
    checked = witnesses = mismatches = 0
    for two in sp_instances(args.table_trials, 9, args.seed):
        tree = recognize_sp(two.graph, *two.terminals)
        audit = audit_tables(tree, cap_for(two.graph.n), max_vertices=9)
        checked += audit.checked
        witnesses += audit.witnesses
        mismatches += len(audit.mismatches)
    return {"ok": mismatches == 0, "entries": checked, "witnesses": witnesses,
            "mismatches": mismatches}


def check_leaf(args) -> dict[str, Any]:
    cap = 12
    t = leaf_table(("x", "y"), cap)
    ok = t.e0 == 1 and all(
        t.value(kind, k, anchor) == k + 1
        for kind in ("a", "b")
        for k in range(1, cap + 1)
        for anchor in ("x", "y")
    )
    return {"ok": ok, "cap": cap}


def check_bound(args) -> dict[str, Any]:
    worst = 0
    over = 0
    for two in sp_instances(args.sp_trials, 40, args.seed):
        value = ctw(two.graph, witness=False).value
        worst = max(worst, value)
        over += value > cap_for(two.graph.n)
    return {"ok": over == 0, "max_ctw": worst, "violations": over}


def _random_connected(rng: random.Random, n: int):
    edges = [(v, rng.randrange(v)) for v in range(1, n)]
    present = {frozenset(e) for e in edges}
    for _ in range(rng.randint(0, n)):
        u, v = rng.sample(range(n), 2)
        if frozenset((u, v)) not in present:
            present.add(frozenset((u, v)))
            edges.append((u, v))
    return build_graph(list(range(n)), edges)


def check_reduction(args) -> dict[str, Any]:
    rng = random.Random(args.seed)
    failures = 0
    for _ in range(args.reduction_trials):
        g = _random_connected(rng, rng.randint(2, 7))
        if brute_ctw(apex_construction(g)).value != brute_tw(g).value + 1:
            failures += 1
    return {"ok": failures == 0, "instances": args.reduction_trials, "failures": failures}


def check_separation(args) -> dict[str, Any]:
    values = []
    sp_ok = True
    for k in range(1, 6):
        g = gen_apex_binary_tree(k)
        values.append(ctw(g, witness=False).value)
        try:
            sp_tree_for_edge(g, g.edges[0])
        except NotSeriesParallel:
            sp_ok = False
    tw_ok = all(brute_tw(gen_apex_binary_tree(k)).value == 2 for k in (1, 2, 3))
    monotone = all(a <= b for a, b in zip(values, values[1:]))
    return {"ok": monotone and sp_ok and tw_ok, "ctw": values}


def check_series_terminals(args) -> dict[str, Any]:
    t1 = leaf_table(("x", "z"), 8)
    t2 = leaf_table(("z", "y"), 8)
    try:
        combine_series_literal(t1, t2)
    except TerminalMismatch as e:
        return {"ok": True, "rejected": str(e)}
    return {"ok": False, "rejected": None}


def _slope(family: str, sizes: list[int], seed: int) -> float | None:
    ms = []
    ns = []
    for size in sizes:
        g = gen_bench(family, size, seed)
        start = time.perf_counter()
        ctw(g, witness=False)
        ms.append((time.perf_counter() - start) * 1000.0)
        ns.append(g.n)
        print(f"    {family} n={g.n}: {ms[-1]:.0f} ms", flush=True)
    return fit_slope(ns, ms)


def check_scaling(args) -> dict[str, Any]:
    sizes = args.bench_sizes
    sp_slope = _slope("biconnected", sizes, args.seed)
    tw2_slope = _slope("tw2", sizes, args.seed)
    ok = (sp_slope is None or sp_slope <= 2.4) and (tw2_slope is None or tw2_slope <= 3.4)
    return {"ok": ok, "biconnected_slope": sp_slope, "tw2_slope": tw2_slope}


CHECKS: list[tuple[str, Callable[[argparse.Namespace], dict[str, Any]]]] = [
    ("oracle equivalence", check_oracle_equivalence),
    ("table entries", check_tables),
    ("leaf initialization", check_leaf),
    ("log bound", check_bound),
    ("apex reduction", check_reduction),
    ("separation family", check_separation),
    ("series terminals", check_series_terminals),
    ("scaling", check_scaling),
]


def main() -> int:
    parser = argparse.ArgumentParser(description="Acceptance battery for the ctw solver")
    parser.add_argument("--config", default=None, help="Path to solver.yaml")
    parser.add_argument("--seed", type=int, default=None, help="Corpus seed")
    parser.add_argument("--quick", action="store_true", help="Reduced corpora, small bench")
    parser.add_argument("--skip-bench", action="store_true", help="Skip the scaling check")
    parser.add_argument("--json", default=None, help="Write results here as JSON")
    args = parser.parse_args()

    config = load_config(Path(args.config) if args.config else None)
    args.seed = config.seed if args.seed is None else args.seed
    if args.quick:
        args.sp_trials, args.tw2_trials, args.table_trials = 50, 20, 10
        args.reduction_trials = 20
        args.bench_sizes = [50, 100, 200]
    else:
        args.sp_trials, args.tw2_trials, args.table_trials = config.compare_trials, 200, 100
        args.reduction_trials = 100
        args.bench_sizes = config.bench_sizes

    results: dict[str, dict[str, Any]] = {}
    for name, check in CHECKS:
        if name == "scaling" and args.skip_bench:
            continue
        print(f"  {name} ...", flush=True)
        start = time.perf_counter()
        result = check(args)
        result["seconds"] = round(time.perf_counter() - start, 2)
        results[name] = result

    print(f"\n{'='*60}")
    print("  ACCEPTANCE")
    print(f"{'='*60}")
    for name, result in results.items():
        mark = "PASS" if result["ok"] else "FAIL"
        detail = ", ".join(f"{k}={v}" for k, v in result.items() if k not in ("ok", "seconds"))
        print(f"  [{mark}] {name:<20} {result['seconds']:>7.1f}s  {detail}")

    if args.json:
        Path(args.json).write_text(json.dumps(results, indent=2, sort_keys=True), encoding="utf-8")
        print(f"\nResults written to {args.json}")

    return 0 if all(r["ok"] for r in results.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
