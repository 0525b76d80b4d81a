"""Exact connected treewidth for graphs of treewidth at most two.

Biconnected series-parallel graphs are solved by a dynamic program over
an SP-tree rooted at a parallel split leaf(xy) + (G - xy), minimized over
all edges xy; one fold plus a top-down pass yields every edge's value.
General treewidth-2 graphs are split into blocks and the block values are
combined along the block-cut tree.

Table entries for a node t with terminals (x_t, y_t):

    e0        rooted instance G_t with roots {x_t, y_t}
    A[k][a]   G_t plus k isolated roots r_1..r_k, roots {a, r_1..r_k},
              fictive edges from the other terminal to every r_i
    B[k][a]   A[k][a] plus the fictive edge x_t y_t

Family vectors are indexed by k; slot cap+1 always holds SATURATED.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from graph import (
    Disconnected,
    Graph,
    Layout,
    Vertex,
    block_cut_tree,
    is_connected,
    is_connected_rooted_layout,
    layout_cost,
)
from sptree import (
    LEAF,
    PARALLEL,
    NotSeriesParallel,
    SPNode,
    postorder,
    preorder,
    sp_tree_for_edge,
)

logger = logging.getLogger(__name__)

# Saturating top value: larger than any real entry, small enough that
# int64 max/min never overflow.
SATURATED: int = 1 << 40


# --------------------------------------------------------------------------- #
# Errors
# --------------------------------------------------------------------------- #


class SolverError(Exception):
    """Base class for solver failures."""

    pass


class TerminalMismatch(SolverError):
    """Raised when tables are combined or read at the wrong terminals."""

    pass


class NotBiconnected(SolverError):
    """Raised when a biconnected-only routine gets a graph with a cut vertex."""

    pass


class NotTreewidth2(SolverError):
    """Raised when a block is not series-parallel.

    Attributes:
        block: Vertices of the offending block, in graph order
    """

    def __init__(self, message: str, block: Sequence[Vertex] = ()):
        super().__init__(message)
        self.block = tuple(block)


class WitnessCostMismatch(SolverError):
    """Raised when a reconstructed layout does not achieve its table value."""

    pass


# --------------------------------------------------------------------------- #
# Tables
# --------------------------------------------------------------------------- #


def cap_for(n: int) -> int:
    """Table cap ceil(2 * (log2(n) + 1)), the treewidth-2 bound on ctw."""
    if n < 1:
        raise ValueError("cap_for needs n >= 1")
    return math.ceil(2 * (math.log2(n) + 1))


@dataclass(frozen=True, eq=False)
class DPTable:
    """Entries of one SP-tree node.

    Family vectors have length cap + 2. Slot 0 is unused, slots 1..cap
    hold the entries, slot cap + 1 holds SATURATED so that a k + 1 shift
    past the cap reads the top value.
    """

    x: Vertex
    y: Vertex
    e0: int
    a_x: np.ndarray
    a_y: np.ndarray
    b_x: np.ndarray
    b_y: np.ndarray
    cap: int

    @property
    def terminals(self) -> tuple:
        return (self.x, self.y)

    def other(self, anchor: Vertex) -> Vertex:
        if anchor == self.x:
            return self.y
        if anchor == self.y:
            return self.x
        raise TerminalMismatch(f"{anchor!r} is not a terminal of {self.terminals}")

    def a(self, anchor: Vertex) -> np.ndarray:
        """A-family vector anchored at a terminal."""
        if anchor == self.x:
            return self.a_x
        if anchor == self.y:
            return self.a_y
        raise TerminalMismatch(f"{anchor!r} is not a terminal of {self.terminals}")

    def b(self, anchor: Vertex) -> np.ndarray:
        """B-family vector anchored at a terminal."""
        if anchor == self.x:
            return self.b_x
        if anchor == self.y:
            return self.b_y
        raise TerminalMismatch(f"{anchor!r} is not a terminal of {self.terminals}")

    def value(self, kind: str, k: int = 0, anchor: Optional[Vertex] = None) -> int:
        """One entry; k beyond the cap reads SATURATED."""
        if kind == "e0":
            return self.e0
        vec = self.a(anchor) if kind == "a" else self.b(anchor)
        if k < 1:
            raise ValueError("family index k starts at 1")
        return SATURATED if k > self.cap else int(vec[k])


def _family(values: np.ndarray) -> np.ndarray:
    values[-1] = SATURATED
    return values


def _shift(vec: np.ndarray) -> np.ndarray:
    """vec[k + 1] at slot k; the last slot reads SATURATED."""
    out = np.empty_like(vec)
    out[:-1] = vec[1:]
    out[-1] = SATURATED
    return out


def leaf_table(edge: tuple, cap: int) -> DPTable:
    """Table of a single edge: e0 = 1 and every family entry k + 1."""
    x, y = edge
    base = _family(np.arange(1, cap + 3, dtype=np.int64))
    return DPTable(x, y, 1, base, base, base, base, cap)


def _check_caps(t1: DPTable, t2: DPTable) -> None:
    if t1.cap != t2.cap:
        raise ValueError(f"tables built with different caps ({t1.cap}, {t2.cap})")


def combine_parallel(t1: DPTable, t2: DPTable) -> DPTable:
    """Parallel composition of two tables over the same terminal pair.

    Raises:
        TerminalMismatch: If the terminal pairs differ
    """
    if {t1.x, t1.y} != {t2.x, t2.y}:
        raise TerminalMismatch(
            f"parallel terminals differ: {t1.terminals} vs {t2.terminals}"
        )
    _check_caps(t1, t2)
    x, y = t1.terminals
    a_x = np.minimum(np.maximum(t1.b(x), t2.e0), np.maximum(t2.b(x), t1.e0))
    a_y = np.minimum(np.maximum(t1.b(y), t2.e0), np.maximum(t2.b(y), t1.e0))
    return DPTable(
        x, y, max(t1.e0, t2.e0), _family(a_x), _family(a_y), a_x, a_y, t1.cap
    )


def _series_terminals(t1: DPTable, t2: DPTable) -> tuple:
    shared = {t1.x, t1.y} & {t2.x, t2.y}
    if len(shared) != 1:
        raise TerminalMismatch(
            f"series tables {t1.terminals} and {t2.terminals} "
            f"must share exactly one terminal"
        )
    (z,) = shared
    x, y = t1.other(z), t2.other(z)
    if x == y:
        raise TerminalMismatch("series composition would close a cycle")
    return x, z, y


def combine_series(t1: DPTable, t2: DPTable) -> DPTable:
    """Series composition: t1 over (x, z), t2 over (z, y), result over (x, y).

    Raises:
        TerminalMismatch: If the tables do not share exactly one terminal
    """
    x, z, y = _series_terminals(t1, t2)
    _check_caps(t1, t2)
    e0 = min(
        max(int(t1.a(x)[1]), t2.e0),
        max(int(t2.a(y)[1]), t1.e0),
    )
    a_x = _family(np.maximum(t1.a(x), t2.a(z)))
    a_y = _family(np.maximum(t2.a(y), t1.a(z)))
    b_x = _family(np.maximum(t1.b(x), _shift(t2.a(z))))
    b_y = _family(np.maximum(t2.b(y), _shift(t1.a(z))))
    return DPTable(x, y, e0, a_x, a_y, b_x, b_y, t1.cap)


def fold(root: SPNode, cap: int, keep: bool = False):
    """Evaluate an SP-tree bottom-up.

    Args:
        root: SP-tree
        cap: Table cap
        keep: Return every node's table instead of only the root's

    Returns:
        The root DPTable, or a dict node -> DPTable when keep is set
    """
    tables: dict = {}
    for node in postorder(root):
        if node.kind == LEAF:
            table = leaf_table(node.terminals, cap)
        else:
            first, second = node.children
            if keep:
                t1, t2 = tables[first], tables[second]
            else:
                t1, t2 = tables.pop(first), tables.pop(second)
            if node.kind == PARALLEL:
                table = combine_parallel(t1, t2)
            else:
                table = combine_series(t1, t2)
        tables[node] = table
    return tables if keep else tables[root]


# --------------------------------------------------------------------------- #
# Results
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class RootedValue:
    """Value of a rooted solve and, when requested, its witness."""

    value: int
    witness: Optional[Layout] = None


@dataclass(frozen=True)
class SolveResult:
    """Connected treewidth of a graph.

    Attributes:
        value: ctw
        witness: Connected layout with cost == value (None if not requested)
        provenance: How the value was chosen: root edge for a biconnected
            graph, starting block and per-block values otherwise
    """

    value: int
    witness: Optional[Layout] = None
    provenance: dict = field(default_factory=dict)


# --------------------------------------------------------------------------- #
# Rooted-edge values
# --------------------------------------------------------------------------- #


def _edge_value(g: Graph, edge: tuple, cap: int) -> int:
    """Rooted-edge value of one edge, folded from its own SP-tree."""
    return fold(sp_tree_for_edge(g, edge), cap).e0


def rooted_edge_values(g: Graph, cap: int) -> dict:
    """Rooted-edge value of every edge of a biconnected SP graph.

    One SP-tree is folded bottom-up. A top-down pass then gives every
    node the table of the graph outside it, over the node's terminals:

        parallel p = c1 | c2    out(c1) = down(c2) | out(p)
        series   s = c1 . c2    out(c1) = out(s) . down(c2)

    The value of edge e is the E0 entry of leaf(e) | out(leaf(e)), which
    is max(1, out.e0). Values up to the cap are exact.

    Returns:
        dict frozenset({u, v}) -> value

    Raises:
        NotSeriesParallel: If g is not series-parallel
    """
    root = sp_tree_for_edge(g, g.edges[0])
    if root.kind == LEAF:
        return {frozenset(root.terminals): 1}

    down = fold(root, cap, keep=True)
    edge_leaf, rest = root.children
    outside = {edge_leaf: down[rest], rest: down[edge_leaf]}
    for node in preorder(rest):
        if node.kind == LEAF:
            continue
        out = outside.pop(node)
        c1, c2 = node.children
        if node.kind == PARALLEL:
            outside[c1] = combine_parallel(down[c2], out)
            outside[c2] = combine_parallel(down[c1], out)
        else:
            outside[c1] = combine_series(out, down[c2])
            outside[c2] = combine_series(down[c1], out)
    return {frozenset(node.terminals): max(1, t.e0) for node, t in outside.items()}


@dataclass(frozen=True)
class _Choice:
    """Winning root edge of a block solve and the cap it is exact under."""

    value: int
    edge: tuple
    cap: int


class _EdgeScan:
    """Rooted-edge values of one biconnected graph, computed once per cap."""

    def __init__(self, g: Graph):
        self.g = g
        self._by_cap: dict = {}

    def values(self, cap: int) -> dict:
        if cap not in self._by_cap:
            self._by_cap[cap] = rooted_edge_values(self.g, cap)
        return self._by_cap[cap]

    def best(self, edges: Sequence[tuple], cap: int) -> _Choice:
        """First edge with the smallest value.

        A value is exact when it does not exceed the cap it was computed
        with. Otherwise the scan is repeated with cap raised to
        max(2 cap, n), past which every value is exact.
        """
        while True:
            values = self.values(cap)
            scores = [values[frozenset(e)] for e in edges]
            best = min(range(len(scores)), key=scores.__getitem__)
            if scores[best] <= cap or cap >= self.g.n:
                return _Choice(scores[best], tuple(edges[best]), cap)
            new_cap = max(2 * cap, self.g.n)
            logger.debug("value %d exceeds cap %d; retrying with cap %d",
                         scores[best], cap, new_cap)
            cap = new_cap


def _trivial(g: Graph) -> Optional[SolveResult]:
    """Graphs with at most two vertices."""
    if g.n == 1:
        return SolveResult(0, Layout(g.vertices), {"trivial": True})
    if g.n == 2:
        if g.m != 1:
            raise Disconnected("two vertices without an edge")
        return SolveResult(1, Layout(g.vertices), {"trivial": True, "root_edge": g.edges[0]})
    return None


def _check_witness(g: Graph, witness: Layout, value: int) -> None:
    """Final witness check, always on."""
    if not is_connected_rooted_layout(g, witness):
        raise WitnessCostMismatch("witness layout is not connected")
    cost = layout_cost(g, witness, use_fictive=False)
    if cost != value:
        raise WitnessCostMismatch(f"witness costs {cost}, solver reported {value}")


def _rooted_edge_witness(g: Graph, edge: tuple, cap: int, audit: bool) -> Layout:
    return witness_for_tree(sp_tree_for_edge(g, edge), cap, audit=audit)


def _starting_at(layout: Layout, r: Vertex) -> Layout:
    """Swap the first two vertices so r comes first.

    The second vertex of a connected layout neighbours the first, so the
    swap leaves every other supporting set unchanged.
    """
    order = list(layout)
    if order[0] != r:
        order[0], order[1] = order[1], order[0]
    return Layout(tuple(order))


def _is_biconnected(g: Graph) -> bool:
    if not is_connected(g):
        return False
    return g.n <= 2 or len(block_cut_tree(g).blocks) == 1


def _edges_at(g: Graph, r: Vertex) -> list:
    edges = [e for e in g.edges if r in e]
    if not edges:
        raise Disconnected(f"{r!r} has no incident edge")
    return edges


def ectvs_rooted_edge(
    g: Graph,
    e: tuple,
    cap: Optional[int] = None,
    witness: bool = True,
    audit: bool = False,
) -> RootedValue:
    """Best connected layout cost with the endpoints of e placed first.

    Args:
        g: Biconnected series-parallel graph
        e: An edge (x, y) of g
        cap: Table cap; defaults to cap_for(n)
        witness: Also reconstruct a layout starting with {x, y}
        audit: Check every intermediate witness

    Raises:
        NotSeriesParallel: If g - xy is not 2-terminal SP at (x, y)
    """
    x, y = e
    if cap is None:
        cap = cap_for(g.n)
    value = _edge_value(g, (x, y), cap)
    while value > cap and cap < g.n:
        cap = max(2 * cap, g.n)
        value = _edge_value(g, (x, y), cap)
    if not witness:
        return RootedValue(value)
    layout = _rooted_edge_witness(g, (x, y), cap, audit)
    _check_witness(g, layout, value)
    return RootedValue(value, layout)


def ctw_biconnected(
    g: Graph,
    cap: Optional[int] = None,
    witness: bool = True,
    audit: bool = False,
) -> SolveResult:
    """Connected treewidth of a biconnected series-parallel graph.

    Minimizes the rooted-edge value over all edges in edge order; ties go
    to the first edge.

    Raises:
        NotBiconnected: If g has a cut vertex or is disconnected
        NotSeriesParallel: If g is not series-parallel
    """
    if g.n == 0:
        raise Disconnected("empty graph")
    if not _is_biconnected(g):
        raise NotBiconnected("graph is not biconnected")
    trivial = _trivial(g)
    if trivial is not None:
        return trivial
    choice = _EdgeScan(g).best(g.edges, cap or cap_for(g.n))
    provenance = {"root_edge": choice.edge, "cap": choice.cap}
    if not witness:
        return SolveResult(choice.value, None, provenance)
    layout = _rooted_edge_witness(g, choice.edge, choice.cap, audit)
    _check_witness(g, layout, choice.value)
    return SolveResult(choice.value, layout, provenance)


def ctvs_block_rooted(
    g: Graph,
    r: Vertex,
    cap: Optional[int] = None,
    witness: bool = True,
    audit: bool = False,
) -> RootedValue:
    """Best connected layout cost of a block that must start at r.

    This is the best rooted-edge value over the edges at r, with the
    witness's first two vertices swapped when r is not already first.
    """
    g.index(r)
    if g.n == 1:
        return RootedValue(0, Layout(g.vertices))
    choice = _EdgeScan(g).best(_edges_at(g, r), cap or cap_for(g.n))
    if not witness:
        return RootedValue(choice.value)
    layout = _starting_at(_rooted_edge_witness(g, choice.edge, choice.cap, audit), r)
    _check_witness(g, layout, choice.value)
    return RootedValue(choice.value, layout)


# --------------------------------------------------------------------------- #
# General treewidth-2 graphs
# --------------------------------------------------------------------------- #


def _block_choices(bg: Graph, cuts: Sequence[Vertex], cap: int) -> tuple:
    """Unrooted choice of a block and its rooted choice at each cut vertex."""
    scan = _EdgeScan(bg)
    unrooted = scan.best(bg.edges, cap)
    rooted = {c: scan.best(_edges_at(bg, c), cap) for c in cuts}
    return unrooted, rooted


def ctw(
    g: Graph,
    cap_slack: int = 0,
    jobs: int = 1,
    witness: bool = True,
    audit: bool = False,
) -> SolveResult:
    """Connected treewidth of a connected graph of treewidth at most two.

    Every block is solved once unrooted and once per cut vertex it
    contains. For each candidate starting block the value is the worst of
    its unrooted value and the rooted values of all other blocks, each
    rooted at its cut vertex toward the start. The witness concatenates
    block witnesses in block-cut-tree preorder from the best start, each
    later block dropping its entry vertex.

    Args:
        g: Connected graph
        cap_slack: Added to cap_for(n)
        jobs: Worker processes for per-block solves
        witness: Reconstruct a witness layout
        audit: Check every intermediate witness

    Raises:
        Disconnected: If g is empty or disconnected
        NotTreewidth2: If some block is not series-parallel
    """
    if g.n == 0 or not is_connected(g):
        raise Disconnected("ctw needs a connected, non-empty graph")
    trivial = _trivial(g)
    if trivial is not None:
        return trivial

    cap = cap_for(g.n) + cap_slack
    bct = block_cut_tree(g)
    graphs = [g.induced(b) for b in bct.blocks]
    cuts = [bct.cuts_of(i) for i in range(len(graphs))]

    def block_error(i: int, exc: Exception) -> NotTreewidth2:
        members = sorted(bct.blocks[i], key=g.index)
        return NotTreewidth2(
            f"block {i} ({len(members)} vertices) is not series-parallel: {exc}",
            block=members,
        )

    if jobs > 1 and len(graphs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_block_choices, bg, cuts[i], cap)
                for i, bg in enumerate(graphs)
            ]
            outcomes = []
            for i, future in enumerate(futures):
                try:
                    outcomes.append(future.result())
                except NotSeriesParallel as exc:
                    raise block_error(i, exc) from exc
    else:
        outcomes = []
        for i, bg in enumerate(graphs):
            try:
                outcomes.append(_block_choices(bg, cuts[i], cap))
            except NotSeriesParallel as exc:
                raise block_error(i, exc) from exc

    unrooted = [u for u, _ in outcomes]
    rooted = {(i, c): choice for i, (_, by_cut) in enumerate(outcomes)
              for c, choice in by_cut.items()}
    for i, choice in enumerate(unrooted):
        logger.debug("block %d: %d vertices, value %d", i, graphs[i].n, choice.value)

    best_value, best_start, best_order = None, None, None
    for start in range(len(graphs)):
        order = bct.preorder(start)
        value = max(
            [unrooted[start].value] + [rooted[(b, entry)].value for b, entry in order[1:]]
        )
        if best_value is None or value < best_value:
            best_value, best_start, best_order = value, start, order

    def choice_for(b: int, entry: Optional[Vertex]) -> _Choice:
        return unrooted[b] if entry is None else rooted[(b, entry)]

    provenance = {
        "start_block": best_start,
        "cap": cap,
        "blocks": [
            {
                "vertices": sorted(bct.blocks[b], key=g.index),
                "entry": entry,
                "value": choice_for(b, entry).value,
            }
            for b, entry in best_order
        ],
    }
    if not witness:
        return SolveResult(best_value, None, provenance)

    order: list = []
    for b, entry in best_order:
        choice = choice_for(b, entry)
        part = _rooted_edge_witness(graphs[b], choice.edge, choice.cap, audit)
        if entry is None:
            order.extend(part)
        else:
            order.extend(_starting_at(part, entry).order[1:])
    layout = Layout(tuple(order))
    _check_witness(g, layout, best_value)
    return SolveResult(best_value, layout, provenance)


from solver.witness import (  # noqa: E402
    Entry,
    Rule,
    entry_instance,
    reconstruct_witness,
    witness_for_tree,
)

__all__ = [
    "DPTable",
    "Entry",
    "NotBiconnected",
    "NotTreewidth2",
    "RootedValue",
    "Rule",
    "SATURATED",
    "SolveResult",
    "SolverError",
    "TerminalMismatch",
    "WitnessCostMismatch",
    "cap_for",
    "combine_parallel",
    "combine_series",
    "ctvs_block_rooted",
    "ctw",
    "ctw_biconnected",
    "ectvs_rooted_edge",
    "entry_instance",
    "fold",
    "leaf_table",
    "reconstruct_witness",
    "rooted_edge_values",
    "witness_for_tree",
]
