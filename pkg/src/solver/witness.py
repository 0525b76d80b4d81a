"""Witness layouts for DP table entries.

Reconstruction runs in two passes over a folded SP-tree. Top-down, each
node receives the entry it must realize and picks the winning branch of
that entry's rule, which fixes the entries its children must realize.
Bottom-up, each node splices its children's layouts together.

Root placeholders of an A/B entry are real vertices outside the node's
subgraph wherever the parent can supply them (the far terminal of a
series sibling, or the anchor of a B rule), and RootPlaceholder tokens
when an entry is examined on its own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from graph import (
    ExtendedRootedGraph,
    Layout,
    Vertex,
    build_graph,
    is_connected_rooted_layout,
    layout_cost,
)
from sptree import LEAF, PARALLEL, SERIES, SPNode, middle, postorder, preorder, realize

from solver import DPTable, TerminalMismatch, WitnessCostMismatch, fold

logger = logging.getLogger(__name__)

E0 = "e0"
A = "a"
B = "b"


@dataclass(frozen=True)
class Entry:
    """Address of one table entry: kind, k and anchor terminal."""

    kind: str
    k: int = 0
    anchor: Optional[Vertex] = None

    def __post_init__(self) -> None:
        if self.kind not in (E0, A, B):
            raise ValueError(f"unknown entry kind {self.kind!r}")
        if self.kind != E0 and (self.k < 1 or self.anchor is None):
            raise ValueError("A/B entries need k >= 1 and an anchor")


ROOT_ENTRY = Entry(E0)


@dataclass(frozen=True, order=True)
class RootPlaceholder:
    """Stand-in for an isolated root r_i of an A/B instance."""

    index: int

    def __repr__(self) -> str:
        return f"r{self.index}"


@dataclass(frozen=True)
class Rule:
    """The winning way to realize an entry at one node.

    Attributes:
        entry: Entry being realized
        roots: Tokens playing r_1..r_k for this entry
        branch: Which side of a two-way minimum won (0 or 1)
        requests: (entry, roots) each child must realize, in child order
    """

    entry: Entry
    roots: tuple = ()
    branch: int = 0
    requests: tuple = ()


def table_value(table: DPTable, entry: Entry) -> int:
    return table.value(entry.kind, entry.k, entry.anchor)


# --------------------------------------------------------------------------- #
# Instances
# --------------------------------------------------------------------------- #


def entry_instance(
    node: SPNode, entry: Entry, roots: Optional[Sequence[Vertex]] = None
) -> ExtendedRootedGraph:
    """The extended rooted instance an entry's value is defined on.

    Args:
        node: SP-tree node t
        entry: E0, or A/B with k and an anchor terminal
        roots: Tokens for r_1..r_k; RootPlaceholder(1..k) by default

    Raises:
        TerminalMismatch: If the anchor is not a terminal of the node
    """
    realized = realize(node)
    g = realized.graph
    x, y = node.terminals
    if entry.kind == E0:
        return ExtendedRootedGraph(solid=g, roots=(x, y), terminals=(x, y))

    if entry.anchor not in (x, y):
        raise TerminalMismatch(f"{entry.anchor!r} is not a terminal of {(x, y)}")
    rs = tuple(roots) if roots is not None else tuple(
        RootPlaceholder(i) for i in range(1, entry.k + 1)
    )
    if len(rs) != entry.k:
        raise ValueError(f"entry needs {entry.k} roots, got {len(rs)}")
    solid = build_graph(list(g.vertices) + list(rs), g.edges)
    far = node.other(entry.anchor)
    fictive = [(far, r) for r in rs]
    if entry.kind == B and not g.has_edge(x, y):
        fictive.append((x, y))
    return ExtendedRootedGraph(
        solid=solid,
        fictive=tuple(fictive),
        roots=(entry.anchor,) + rs,
        terminals=(x, y),
    )


# --------------------------------------------------------------------------- #
# Rules
# --------------------------------------------------------------------------- #


def choose_rule(node: SPNode, tables: dict, entry: Entry, roots: tuple = ()) -> Rule:
    """Pick the branch achieving an entry's value and the child requests.

    Ties go to branch 0.
    """
    if node.kind == LEAF:
        return Rule(entry, roots)

    first, second = node.children
    t1, t2 = tables[first], tables[second]
    none = Entry(E0)

    if node.kind == PARALLEL:
        if entry.kind == E0:
            return Rule(entry, roots, 0, ((none, ()), (none, ())))
        k, a = entry.k, entry.anchor
        left = max(t1.value(B, k, a), t2.e0)
        right = max(t2.value(B, k, a), t1.e0)
        side = Entry(B, k, a)
        if left <= right:
            return Rule(entry, roots, 0, ((side, roots), (none, ())))
        return Rule(entry, roots, 1, ((none, ()), (side, roots)))

    x, y = node.terminals
    z = middle(node)
    if entry.kind == E0:
        left = max(t1.value(A, 1, x), t2.e0)
        right = max(t2.value(A, 1, y), t1.e0)
        if left <= right:
            return Rule(entry, roots, 0, ((Entry(A, 1, x), (y,)), (none, ())))
        return Rule(entry, roots, 1, ((none, ()), (Entry(A, 1, y), (x,))))

    k, a = entry.k, entry.anchor
    if a not in (x, y):
        raise TerminalMismatch(f"{a!r} is not a terminal of {(x, y)}")
    if entry.kind == A:
        near, far_child = (0, 1) if a == x else (1, 0)
        req = [None, None]
        req[near] = (Entry(A, k, a), roots)
        req[far_child] = (Entry(A, k, z), roots)
        return Rule(entry, roots, near, tuple(req))

    near, far_child = (0, 1) if a == x else (1, 0)
    req = [None, None]
    req[near] = (Entry(B, k, a), roots)
    req[far_child] = (Entry(A, k + 1, z), roots + (a,))
    return Rule(entry, roots, near, tuple(req))


# --------------------------------------------------------------------------- #
# Composition
# --------------------------------------------------------------------------- #


def _compose(node: SPNode, rule: Rule, child_orders: Sequence[tuple]) -> tuple:
    entry, roots = rule.entry, rule.roots
    if node.kind == LEAF:
        if entry.kind == E0:
            return node.terminals
        return (entry.anchor,) + tuple(roots) + (node.other(entry.anchor),)

    w1, w2 = child_orders
    if node.kind == PARALLEL:
        if entry.kind == E0:
            return tuple(w1) + tuple(w2[2:])
        # The winning side starts with the anchor and the roots; the other
        # side starts with both terminals.
        win, lose = (w1, w2) if rule.branch == 0 else (w2, w1)
        return tuple(win) + tuple(lose[2:])

    if entry.kind == E0:
        # The A[1] side starts with its anchor then the other far terminal.
        win, lose = (w1, w2) if rule.branch == 0 else (w2, w1)
        return tuple(win) + tuple(lose[2:])

    near, far = (w1, w2) if rule.branch == 0 else (w2, w1)
    k = entry.k
    skip = 1 + k if entry.kind == A else 2 + k
    return tuple(near) + tuple(far[skip:])


def reconstruct_witness(
    node: SPNode,
    chosen_rule: Rule,
    child_witnesses: Sequence[Sequence[Vertex]] = (),
    expected: Optional[int] = None,
) -> Layout:
    """Splice child witnesses into a witness for one node entry.

    Args:
        node: SP-tree node
        chosen_rule: Rule from choose_rule() for this node
        child_witnesses: Layouts realizing the rule's child requests
        expected: Table value the result must achieve; when given the
            layout is checked against entry_instance()

    Raises:
        WitnessCostMismatch: If the composed layout is not a connected
            rooted layout of the entry instance or misses `expected`
    """
    order = _compose(node, chosen_rule, [tuple(w) for w in child_witnesses])
    layout = Layout(order)
    if expected is not None:
        instance = entry_instance(node, chosen_rule.entry, chosen_rule.roots)
        if not is_connected_rooted_layout(instance, layout):
            raise WitnessCostMismatch(
                f"{chosen_rule.entry} witness at {node.terminals} is not connected"
            )
        cost = layout_cost(instance, layout, use_fictive=True)
        if cost != expected:
            raise WitnessCostMismatch(
                f"{chosen_rule.entry} witness at {node.terminals} costs {cost}, "
                f"table says {expected}"
            )
    return layout


def witness_for_tree(
    root: SPNode,
    cap: int,
    entry: Entry = ROOT_ENTRY,
    roots: tuple = (),
    audit: bool = False,
    tables: Optional[dict] = None,
) -> Layout:
    """Witness for one entry of a tree's root (E0 by default).

    Args:
        root: SP-tree
        cap: Table cap used for folding
        entry: Root entry to realize
        roots: Tokens for the entry's r_1..r_k
        audit: Check every intermediate layout against its table value
        tables: Precomputed fold(root, cap, keep=True)
    """
    if tables is None:
        tables = fold(root, cap, keep=True)

    rules: dict = {}
    requests: dict = {root: (entry, tuple(roots))}
    for node in preorder(root):
        node_entry, node_roots = requests.pop(node)
        rule = choose_rule(node, tables, node_entry, node_roots)
        rules[node] = rule
        for child, request in zip(node.children, rule.requests):
            requests[child] = request

    orders: dict = {}
    for node in postorder(root):
        rule = rules.pop(node)
        children = [orders.pop(c) for c in node.children]
        if audit:
            expected = table_value(tables[node], rule.entry)
            orders[node] = reconstruct_witness(node, rule, children, expected).order
        else:
            orders[node] = _compose(node, rule, children)
    return Layout(orders[root])
