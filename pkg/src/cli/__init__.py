"""ctw command line: solve, oracle, compare, gen, bench, verify.

JSON reports go to stdout and a one-line human summary to stderr
(`--format text` prints only the summary, to stdout). Exit codes:

    0  ok
    1  usage, parse, layout or configuration error; disconnected input
    2  no answer for this input: treewidth above 2, too large for the
       oracle, no connected rooted layout, or a verified layout that
       fails its check
    3  internal invariant violated (witness cost mismatch, DP/oracle
       disagreement)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from cli.formats import (
    ParseError,
    format_dot,
    format_edge_list,
    format_instance,
    load_instance,
    read_text,
    resolve_tokens,
    split_tokens,
)
from config import SolverConfig, load_config
from ctw_sp import __version__
from differential import (
    FAMILIES,
    audit_tables,
    compare_instance,
    corpus,
    sp_instances,
)
from generators import (
    BENCH_FAMILIES,
    UnknownName,
    gen_apex_binary_tree,
    gen_atlas,
    gen_bench,
    gen_named,
    gen_random_sp,
    gen_tw2,
)
from graph import (
    Disconnected,
    ExtendedRootedGraph,
    Graph,
    GraphError,
    Layout,
    build_graph,
    is_connected,
    is_connected_rooted_layout,
    layout_cost,
)
from oracle import NoConnectedLayout, TooLarge, brute_ctw, brute_ectvs, brute_tw
from schema import ValidationError, validate_report
from solver import (
    NotBiconnected,
    NotTreewidth2,
    SolverError,
    WitnessCostMismatch,
    cap_for,
    ctw,
)
from sptree import NotSeriesParallel, recognize_sp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSOLVABLE = 2
EXIT_INTERNAL = 3

# Vertex ceiling for atlas comparisons; the atlas itself stops at 7.
ATLAS_COMPARE_MAX_N: int = 6


# --------------------------------------------------------------------------- #
# Argument parsing
# --------------------------------------------------------------------------- #


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=None,
        help="Path to solver.yaml (default: $CTW_CONFIG or config/solver.yaml).",
    )
    common.add_argument(
        "--format",
        choices=("json", "text"),
        default="json",
        help="json: report on stdout, summary on stderr; text: summary only.",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    common.add_argument("--seed", type=int, default=None, help="Generator seed.")
    common.add_argument(
        "--oracle-limit", type=int, default=None, help="Max vertices for brute force."
    )
    common.add_argument(
        "--jobs", type=int, default=None, help="Worker processes for per-block solves."
    )
    common.add_argument(
        "--witness",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Reconstruct and report a witness layout.",
    )
    common.add_argument(
        "--cap-slack", type=int, default=None, help="Added to the table cap."
    )
    common.add_argument(
        "--simplify",
        action="store_true",
        help="Collapse duplicate edges and drop self-loops in edge-list input.",
    )
    common.add_argument(
        "--dot", action="store_true", help="Echo the input graph as DOT on stderr."
    )
    return common


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in split_tokens(text)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected integers: {text!r}") from e
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"expected positive integers: {text!r}")
    return values


def build_arg_parser() -> argparse.ArgumentParser:
    """Build argument parser for the ctw CLI."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="ctw",
        description="Exact connected treewidth for graphs of treewidth at most 2.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="Solve one graph.")
    solve.add_argument("input", help="Edge list or instance JSON ('-' for stdin).")

    oracle = sub.add_parser("oracle", parents=[common], help="Brute-force one instance.")
    oracle.add_argument("input", help="Edge list or instance JSON ('-' for stdin).")
    oracle.add_argument("--roots", default=None, help="Comma-separated root vertices.")
    oracle.add_argument(
        "--fictive", default=None, help="Fictive edges as u-v pairs, comma-separated."
    )
    oracle.add_argument(
        "--isolated",
        default=None,
        help="Extra isolated vertices to add (e.g. root placeholders).",
    )
    oracle.add_argument(
        "--tw", action="store_true", help="Unrestricted layouts (treewidth)."
    )

    compare = sub.add_parser("compare", parents=[common], help="DP vs oracle.")
    compare.add_argument(
        "--family",
        choices=FAMILIES + ("atlas",),
        default="sp",
        help="Generated family to compare on.",
    )
    compare.add_argument("--corpus", default=None, help="Directory of instance files.")
    compare.add_argument("--trials", type=int, default=None, help="Instances to run.")
    compare.add_argument("--max-n", type=int, default=None, help="Vertex ceiling.")
    compare.add_argument(
        "--tables",
        action="store_true",
        help="Also audit every small DP table entry (sp family).",
    )

    gen = sub.add_parser("gen", parents=[common], help="Generate an instance.")
    gen.add_argument(
        "--kind", choices=("sp", "tw2", "apex", "named"), default="sp"
    )
    gen.add_argument("--edges", type=int, default=10, help="Composition leaves (sp).")
    gen.add_argument("--biconnected", action="store_true", help="sp: force xy || rest.")
    gen.add_argument("--blocks", type=int, default=3, help="Blocks (tw2).")
    gen.add_argument("--block-size", type=int, default=6, help="Leaves per block (tw2).")
    gen.add_argument("--k", type=int, default=2, help="Tree height (apex).")
    gen.add_argument("--name", default=None, help="Graph name (named).")
    gen.add_argument(
        "--as",
        dest="emit_as",
        choices=("edges", "json"),
        default="edges",
        help="Edge list or extended-instance JSON.",
    )
    gen.add_argument("--out", default=None, help="Write here instead of stdout.")

    bench = sub.add_parser("bench", parents=[common], help="Scaling benchmark.")
    bench.add_argument("--sizes", type=_int_list, default=None, help="e.g. 200,400,800")
    bench.add_argument(
        "--family", choices=BENCH_FAMILIES, default="biconnected"
    )
    bench.add_argument("--csv", default=None, help="Write the (n, ms) table here.")

    verify = sub.add_parser("verify", parents=[common], help="Check a layout.")
    verify.add_argument("input", help="Edge list or instance JSON ('-' for stdin).")
    group = verify.add_mutually_exclusive_group(required=True)
    group.add_argument("--layout", default=None, help="Comma-separated vertex order.")
    group.add_argument("--layout-file", default=None, help="File with the vertex order.")
    verify.add_argument("--expect", type=int, default=None, help="Required cost.")
    return parser


def validate_args(args: argparse.Namespace) -> None:
    """Validate parsed arguments.

    Raises:
        SystemExit: If validation fails
    """
    for name in ("jobs", "oracle_limit", "trials", "max_n"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            print(f"Error: --{name.replace('_', '-')} must be at least 1", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
    if getattr(args, "cap_slack", None) is not None and args.cap_slack < 0:
        print("Error: --cap-slack must be non-negative", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    if args.command == "gen" and args.kind == "named" and not args.name:
        print("Error: --kind named needs --name", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def apply_overrides(args: argparse.Namespace, config: SolverConfig) -> SolverConfig:
    """Command-line flags win over config values."""
    for flag, attr in (
        ("oracle_limit", "oracle_limit"),
        ("jobs", "jobs"),
        ("witness", "witness"),
        ("cap_slack", "cap_slack"),
        ("seed", "seed"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, attr, value)
    return config


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #


def _elapsed_ms(start: float) -> float:
    return round((time.perf_counter() - start) * 1000.0, 3)


def _read_graph(args: argparse.Namespace) -> ExtendedRootedGraph:
    instance = load_instance(args.input, simplify=args.simplify)
    if args.dot:
        print(format_dot(instance.solid), file=sys.stderr, end="", flush=True)
    return instance


def cmd_solve(args: argparse.Namespace, config: SolverConfig) -> dict[str, Any]:
    """Solve one graph and re-validate its witness."""
    g = _read_graph(args).solid
    start = time.perf_counter()
    result = ctw(
        g,
        cap_slack=config.cap_slack,
        jobs=config.jobs,
        witness=config.witness,
        audit=config.audit_witness_steps,
    )
    elapsed = _elapsed_ms(start)

    if result.witness is not None:
        if not is_connected_rooted_layout(g, result.witness):
            raise WitnessCostMismatch("reported witness is not a connected layout")
        cost = layout_cost(g, result.witness, use_fictive=False)
        if cost != result.value:
            raise WitnessCostMismatch(f"witness costs {cost}, reported {result.value}")

    provenance = result.provenance
    report: dict[str, Any] = {
        "command": "solve",
        "status": "ok",
        "n": g.n,
        "m": g.m,
        "ctw": result.value,
        "cap": cap_for(g.n) + config.cap_slack,
        "within_bound": result.value <= cap_for(g.n),
        "witness": list(result.witness) if result.witness is not None else None,
        "blocks": provenance.get("blocks", []),
        "wall_time_ms": elapsed,
    }
    if "start_block" in provenance:
        report["start_block"] = provenance["start_block"]
    if "root_edge" in provenance:
        report["root_edge"] = list(provenance["root_edge"])
    return report


def _oracle_instance(args: argparse.Namespace) -> ExtendedRootedGraph:
    instance = _read_graph(args)
    isolated = split_tokens(args.isolated)
    fictive_tokens = split_tokens(args.fictive)
    root_tokens = split_tokens(args.roots)
    if not (isolated or fictive_tokens or root_tokens):
        return instance

    solid = instance.solid
    if isolated:
        solid = build_graph(list(solid.vertices) + isolated, solid.edges)
    fictive = list(instance.fictive)
    for token in fictive_tokens:
        ends = token.split("-")
        if len(ends) != 2:
            raise ParseError(f"fictive edge {token!r} is not of the form u-v")
        fictive.append(tuple(resolve_tokens(solid.vertices, ends)))
    roots = resolve_tokens(solid.vertices, root_tokens) if root_tokens else instance.roots
    return ExtendedRootedGraph(
        solid=solid, fictive=tuple(fictive), roots=tuple(roots)
    )


def cmd_oracle(args: argparse.Namespace, config: SolverConfig) -> dict[str, Any]:
    """Brute-force value and optimal layout for one instance."""
    instance = _oracle_instance(args)
    start = time.perf_counter()
    if args.tw:
        mode = "tw"
        result = brute_tw(instance.solid, limit=config.tw_limit)
    elif instance.roots:
        mode = "ectvs"
        result = brute_ectvs(instance, limit=config.oracle_limit)
    else:
        mode = "ctw"
        if not is_connected(instance.solid):
            raise NoConnectedLayout("disconnected input and no roots to cover it")
        result = brute_ctw(instance.solid, limit=config.oracle_limit)
    return {
        "command": "oracle",
        "status": "ok",
        "mode": mode,
        "n": instance.solid.n,
        "m": instance.solid.m,
        "value": result.value,
        "layout": list(result.layout),
        "roots": list(instance.roots),
        "wall_time_ms": _elapsed_ms(start),
    }


def _corpus_graphs(directory: str, simplify: bool) -> list[Graph]:
    root = Path(directory)
    if not root.is_dir():
        raise ParseError(f"corpus {directory} is not a directory")
    files = sorted(p for p in root.iterdir() if p.is_file() and not p.name.startswith("."))
    return [load_instance(str(p), simplify=simplify).solid for p in files]


def _mismatch_entry(index: int, g: Graph, **fields: Any) -> dict[str, Any]:
    return {"index": index, "edges": [list(e) for e in g.edges], **fields}


def cmd_compare(args: argparse.Namespace, config: SolverConfig) -> dict[str, Any]:
    """Run DP and oracle side by side; any disagreement is a mismatch."""
    trials = args.trials or config.compare_trials
    max_n = args.max_n or config.compare_max_n
    start = time.perf_counter()

    if args.corpus:
        graphs = _corpus_graphs(args.corpus, args.simplify)
        label = args.corpus
    elif args.family == "atlas":
        graphs = [
            g
            for g in gen_atlas(min(max_n, ATLAS_COMPARE_MAX_N))
            if brute_tw(g, limit=config.tw_limit).value <= 2
        ]
        label = "atlas"
    else:
        graphs = list(corpus(args.family, trials, max_n, config.seed))
        label = args.family

    mismatches: list[dict[str, Any]] = []
    for i, g in enumerate(graphs):
        c = compare_instance(g, oracle_limit=config.oracle_limit, cap_slack=config.cap_slack)
        if not c.ok:
            mismatches.append(
                _mismatch_entry(
                    i, g, dp=c.dp, oracle=c.oracle,
                    witness_ok=c.witness_ok, within_bound=c.within_bound,
                )
            )

    tables_checked = 0
    if args.tables and not args.corpus and args.family == "sp":
        for i, two in enumerate(sp_instances(trials, max_n, config.seed)):
            tree = recognize_sp(two.graph, *two.terminals)
            cap = cap_for(two.graph.n) + config.cap_slack
            audit = audit_tables(
                tree, cap, max_vertices=config.table_audit_max_vertices,
                oracle_limit=config.oracle_limit,
            )
            tables_checked += audit.checked
            for bad in audit.mismatches:
                mismatches.append(
                    _mismatch_entry(
                        i, two.graph, terminals=list(bad.terminals),
                        entry=[bad.entry.kind, bad.entry.k, bad.entry.anchor],
                        dp=bad.dp, oracle=bad.oracle,
                    )
                )

    return {
        "command": "compare",
        "status": "mismatch" if mismatches else "ok",
        "family": label,
        "instances": len(graphs),
        "tables_checked": tables_checked,
        "mismatches": mismatches,
        "wall_time_ms": _elapsed_ms(start),
    }


def _generate(args: argparse.Namespace, config: SolverConfig) -> Graph:
    if args.kind == "sp":
        return gen_random_sp(args.edges, config.seed, biconnected=args.biconnected).graph
    if args.kind == "tw2":
        return gen_tw2(args.blocks, args.block_size, config.seed)
    if args.kind == "apex":
        return gen_apex_binary_tree(args.k)
    return gen_named(args.name)


def cmd_gen(args: argparse.Namespace, config: SolverConfig) -> dict[str, Any]:
    """Write a generated instance as an edge list (or instance JSON)."""
    g = _generate(args, config)
    if args.emit_as == "json":
        text = format_instance(ExtendedRootedGraph(solid=g))
    else:
        text = format_edge_list(g)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return {"command": "gen", "status": "ok", "n": g.n, "m": g.m}


def fit_slope(ns: list[int], ms: list[float]) -> Optional[float]:
    """Slope of log(ms) against log(n); None with fewer than two sizes."""
    if len(ns) < 2:
        return None
    slope = np.polyfit(np.log(ns), np.log(np.maximum(ms, 1e-3)), 1)[0]
    return round(float(slope), 4)


def cmd_bench(args: argparse.Namespace, config: SolverConfig) -> dict[str, Any]:
    """Time solves over doubling sizes and fit the log-log slope."""
    sizes = args.sizes or config.bench_sizes
    rows: list[dict[str, Any]] = []
    for size in sizes:
        g = gen_bench(args.family, size, config.seed)
        start = time.perf_counter()
        result = ctw(g, cap_slack=config.cap_slack, jobs=config.jobs, witness=config.witness)
        ms = _elapsed_ms(start)
        rows.append({"n": g.n, "m": g.m, "ctw": result.value, "ms": ms})
        print(f"  n={g.n} m={g.m} ctw={result.value} {ms:.1f} ms", file=sys.stderr, flush=True)

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["n", "m", "ctw", "ms"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.csv:
        Path(args.csv).write_text(buf.getvalue(), encoding="utf-8")

    return {
        "command": "bench",
        "status": "ok",
        "family": args.family,
        "rows": rows,
        "slope": fit_slope([r["n"] for r in rows], [r["ms"] for r in rows]),
        "csv": buf.getvalue(),
    }


def cmd_verify(args: argparse.Namespace, config: SolverConfig) -> dict[str, Any]:
    """Check connectivity and cost of a given layout."""
    instance = _read_graph(args)
    text = args.layout if args.layout is not None else read_text(args.layout_file)
    layout = Layout(tuple(resolve_tokens(instance.vertices, split_tokens(text))))
    connected = is_connected_rooted_layout(instance, layout)
    cost = layout_cost(instance, layout, use_fictive=True)
    ok = connected and (args.expect is None or cost == args.expect)
    return {
        "command": "verify",
        "status": "ok" if ok else "invalid",
        "n": instance.solid.n,
        "layout": list(layout),
        "connected": connected,
        "cost": cost,
        "expect": args.expect,
    }


COMMANDS: dict[str, Callable[[argparse.Namespace, SolverConfig], dict[str, Any]]] = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "gen": cmd_gen,
    "bench": cmd_bench,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------- #
# Output
# --------------------------------------------------------------------------- #


def summarize(report: dict[str, Any]) -> str:
    """One-line human summary of a report."""
    command, status = report["command"], report["status"]
    if status == "error":
        err = report["error"]
        return f"ctw {command}: {err['type']}: {err['message']}"
    if command == "solve":
        return (f"ctw = {report['ctw']} (n={report['n']}, m={report['m']}, "
                f"{len(report['blocks'])} block(s), {report['wall_time_ms']:.1f} ms)")
    if command == "oracle":
        return f"{report['mode']} = {report['value']} (n={report['n']})"
    if command == "compare":
        return (f"compare {report['family']}: {report['instances']} instance(s), "
                f"{report['tables_checked']} table entries, "
                f"{len(report['mismatches'])} mismatch(es)")
    if command == "gen":
        return f"generated n={report['n']} m={report['m']}"
    if command == "bench":
        return f"bench {report['family']}: slope {report['slope']}"
    return (f"layout {'valid' if status == 'ok' else 'INVALID'}: "
            f"connected={report['connected']} cost={report['cost']}")


def emit(report: dict[str, Any], fmt: str) -> None:
    validate_report(report)
    summary = summarize(report)
    if report["command"] == "gen":
        print(summary, file=sys.stderr, flush=True)
        return
    if fmt == "text":
        if report["command"] == "bench":
            print(report["csv"], end="", flush=True)
        print(summary, flush=True)
        return
    print(json.dumps(report, sort_keys=True, indent=2), flush=True)
    print(summary, file=sys.stderr, flush=True)


def _exit_code(report: dict[str, Any]) -> int:
    status = report["status"]
    if status == "mismatch":
        return EXIT_INTERNAL
    if status == "invalid":
        return EXIT_UNSOLVABLE
    return EXIT_OK


def _error_report(command: str, exc: Exception) -> dict[str, Any]:
    error: dict[str, Any] = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NotTreewidth2) and exc.block:
        error["block"] = list(exc.block)
    return {"command": command, "status": "error", "error": error}


# Checked in order; the first matching class decides the exit code.
_ERROR_CODES: tuple[tuple[type, int], ...] = (
    (NotTreewidth2, EXIT_UNSOLVABLE),
    (NotSeriesParallel, EXIT_UNSOLVABLE),
    (NotBiconnected, EXIT_UNSOLVABLE),
    (TooLarge, EXIT_UNSOLVABLE),
    (NoConnectedLayout, EXIT_UNSOLVABLE),
    (SolverError, EXIT_INTERNAL),
    (ParseError, EXIT_USAGE),
    (ValidationError, EXIT_USAGE),
    (Disconnected, EXIT_USAGE),
    (GraphError, EXIT_USAGE),
    (UnknownName, EXIT_USAGE),
    (ValueError, EXIT_USAGE),
)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
        validate_args(args)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = apply_overrides(
            args, load_config(Path(args.config) if args.config else None)
        )
        report = COMMANDS[args.command](args, config)
        code = _exit_code(report)
    except tuple(cls for cls, _ in _ERROR_CODES) as exc:
        code = next(c for cls, c in _ERROR_CODES if isinstance(exc, cls))
        logger.debug("%s failed", args.command, exc_info=True)
        report = _error_report(args.command, exc)

    emit(report, args.format)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
