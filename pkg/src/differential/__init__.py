"""DP-versus-oracle comparison.

Shared by `ctw compare`, the acceptance script and the test-suite: seeded
instance corpora, whole-graph comparison, and the table-level audit that
checks every DP entry of small SP-tree nodes against brute force.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from generators import gen_apex_binary_tree, gen_random_sp, gen_tw2
from graph import Graph, is_connected_rooted_layout, layout_cost
from oracle import brute_ctw, brute_ectvs
from solver import (
    SATURATED,
    DPTable,
    Entry,
    WitnessCostMismatch,
    cap_for,
    ctw,
    entry_instance,
    fold,
    witness_for_tree,
)
from solver.witness import A, B, E0, RootPlaceholder
from sptree import SPNode, TwoTerminalGraph, postorder

logger = logging.getLogger(__name__)

FAMILIES = ("sp", "tw2", "apex")


# --------------------------------------------------------------------------- #
# Corpora
# --------------------------------------------------------------------------- #


def sp_instances(trials: int, max_n: int, seed: int = 0) -> Iterator[TwoTerminalGraph]:
    """Seeded random 2-terminal SP graphs with at most max_n vertices."""
    rng = random.Random(seed)
    produced = 0
    while produced < trials:
        edges = rng.randint(1, max(1, 2 * max_n - 3))
        sub_seed = rng.randrange(2**32)
        two = gen_random_sp(edges, sub_seed, biconnected=rng.random() < 0.5)
        if two.graph.n <= max_n:
            produced += 1
            yield two


def sp_corpus(trials: int, max_n: int, seed: int = 0) -> Iterator[Graph]:
    """Seeded random SP graphs (biconnected or not) with at most max_n vertices."""
    for two in sp_instances(trials, max_n, seed):
        yield two.graph


def tw2_corpus(trials: int, max_n: int, seed: int = 0) -> Iterator[Graph]:
    """Seeded glued treewidth-2 graphs with at most max_n vertices."""
    rng = random.Random(seed)
    produced = 0
    while produced < trials:
        blocks = rng.randint(1, 3)
        block_size = rng.randint(1, max(1, max_n - 2))
        g = gen_tw2(blocks, block_size, rng.randrange(2**32))
        if g.n <= max_n:
            produced += 1
            yield g


def apex_corpus(max_k: int = 3) -> Iterator[Graph]:
    for k in range(1, max_k + 1):
        yield gen_apex_binary_tree(k)


def corpus(family: str, trials: int, max_n: int, seed: int = 0) -> Iterator[Graph]:
    if family == "sp":
        return sp_corpus(trials, max_n, seed)
    if family == "tw2":
        return tw2_corpus(trials, max_n, seed)
    if family == "apex":
        return apex_corpus(min(trials, 3))
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


# --------------------------------------------------------------------------- #
# Whole-graph comparison
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Comparison:
    """DP and oracle answers for one graph."""

    n: int
    m: int
    dp: int
    oracle: int
    witness_ok: bool
    within_bound: bool

    @property
    def ok(self) -> bool:
        return self.dp == self.oracle and self.witness_ok and self.within_bound


def compare_instance(
    g: Graph, oracle_limit: Optional[int] = None, cap_slack: int = 0
) -> Comparison:
    """Solve g both ways and check the DP witness and the log bound."""
    result = ctw(g, cap_slack=cap_slack)
    truth = brute_ctw(g, limit=oracle_limit).value
    witness_ok = (
        result.witness is not None
        and is_connected_rooted_layout(g, result.witness)
        and layout_cost(g, result.witness, use_fictive=False) == result.value
    )
    comparison = Comparison(
        n=g.n,
        m=g.m,
        dp=result.value,
        oracle=truth,
        witness_ok=witness_ok,
        within_bound=result.value <= cap_for(g.n),
    )
    if not comparison.ok:
        logger.warning("mismatch on %s: %s", list(g.edges), comparison)
    return comparison


# --------------------------------------------------------------------------- #
# Table-level audit
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class TableMismatch:
    terminals: tuple
    entry: Entry
    dp: int
    oracle: int


@dataclass
class TableAudit:
    """Outcome of audit_tables(): entries checked and entries that differ."""

    checked: int = 0
    witnesses: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _entries(node: SPNode, cap: int, room: int) -> Iterator[Entry]:
    yield Entry(E0)
    for k in range(1, min(cap, room) + 1):
        for anchor in node.terminals:
            yield Entry(A, k, anchor)
            yield Entry(B, k, anchor)


def audit_tables(
    tree: SPNode,
    cap: int,
    max_vertices: int = 9,
    witnesses: bool = True,
    oracle_limit: Optional[int] = None,
) -> TableAudit:
    """Compare every small table entry of a tree with brute force.

    An entry is checked when its instance (node span plus k roots) has at
    most max_vertices vertices. Values up to the cap must match exactly;
    above the cap the DP only has to stay above it too.
    """
    tables = fold(tree, cap, keep=True)
    audit = TableAudit()
    for node in postorder(tree):
        room = max_vertices - len(node.span())
        if room < 0:
            continue
        table: DPTable = tables[node]
        for entry in _entries(node, cap, room):
            dp = table.value(entry.kind, entry.k, entry.anchor)
            instance = entry_instance(node, entry)
            truth = brute_ectvs(instance, limit=oracle_limit).value
            audit.checked += 1
            agrees = dp == truth if truth <= cap else dp > cap
            if not agrees:
                audit.mismatches.append(TableMismatch(node.terminals, entry, dp, truth))
                logger.warning("table mismatch at %s %s: dp=%d oracle=%d",
                               node.terminals, entry, dp, truth)
                continue
            if witnesses and dp <= cap:
                roots = tuple(RootPlaceholder(i) for i in range(1, entry.k + 1))
                layout = witness_for_tree(node, cap, entry, roots, tables=tables)
                if not (
                    is_connected_rooted_layout(instance, layout)
                    and layout_cost(instance, layout) == dp
                ):
                    raise WitnessCostMismatch(
                        f"{entry} witness at {node.terminals} misses {dp}"
                    )
                audit.witnesses += 1
    return audit


def combine_series_literal(t1: DPTable, t2: DPTable) -> DPTable:
    """Series rule with the far-terminal entries read from the wrong child.

    Reads t1's A/B families at y, which is not a terminal of t1; the
    anchor lookup rejects that with TerminalMismatch. Kept so tests can
    show the mirrored rule is the only well-typed reading.
    """
    shared = {t1.x, t1.y} & {t2.x, t2.y}
    (z,) = shared
    x, y = t1.other(z), t2.other(z)
    a_y = np.maximum(t1.a(y), t2.a(z))
    b_y = np.maximum(t1.b(y), np.append(t2.a(z)[1:], SATURATED))
    a_x = np.maximum(t1.a(x), t2.a(z))
    b_x = np.maximum(t1.b(x), np.append(t2.a(z)[1:], SATURATED))
    e0 = min(max(int(t1.a(x)[1]), t2.e0), max(int(t2.a(y)[1]), t1.e0))
    return DPTable(x, y, e0, a_x, a_y, b_x, b_y, t1.cap)
