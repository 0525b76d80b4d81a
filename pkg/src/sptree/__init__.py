"""Series-parallel decomposition trees.

An SP-tree records how a 2-terminal graph is built from single edges by
series composition (identify one terminal of each part) and parallel
composition (identify both terminal pairs). Leaves are edges.

Children may sit in either terminal orientation: a parallel child's
terminal pair equals its parent's as an unordered pair, and a series
node's first child contains the node's first terminal. Consumers look
terminals up by vertex, never by slot.

Trees built by reduction can be as deep as the graph is long, so every
traversal here is iterative.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from graph import (
    Disconnected,
    Graph,
    NotAnEdge,
    Vertex,
    is_connected,
    simplify_multigraph,
)

logger = logging.getLogger(__name__)

LEAF = "leaf"
SERIES = "series"
PARALLEL = "parallel"


class SPTreeError(ValueError):
    """Base class for SP-tree failures."""

    pass


class NotSeriesParallel(SPTreeError):
    """Raised when a graph is not 2-terminal series-parallel at (x, y)."""

    pass


class MalformedTree(SPTreeError):
    """Raised when a tree violates the composition invariants."""

    pass


@dataclass(frozen=True, eq=False)
class SPNode:
    """One node of an SP-tree.

    Attributes:
        kind: LEAF, SERIES or PARALLEL
        terminals: (x_t, y_t)
        children: Empty for leaves, exactly two otherwise
    """

    kind: str
    terminals: tuple
    children: tuple = ()

    @property
    def x(self) -> Vertex:
        return self.terminals[0]

    @property
    def y(self) -> Vertex:
        return self.terminals[1]

    def other(self, terminal: Vertex) -> Vertex:
        """The terminal that is not `terminal`."""
        x, y = self.terminals
        if terminal == x:
            return y
        if terminal == y:
            return x
        raise MalformedTree(f"{terminal!r} is not a terminal of {self.terminals}")

    def span(self) -> frozenset:
        """Vertex set V_t of the subgraph this node denotes."""
        out = set()
        for node in preorder(self):
            if node.kind == LEAF:
                out.update(node.terminals)
        return frozenset(out)

    def leaf_count(self) -> int:
        return sum(1 for node in preorder(self) if node.kind == LEAF)


SPTree = SPNode


def leaf(x: Vertex, y: Vertex) -> SPNode:
    if x == y:
        raise MalformedTree(f"leaf edge {x!r}-{y!r} is a self-loop")
    return SPNode(LEAF, (x, y))


def series(first: SPNode, second: SPNode) -> SPNode:
    """Series composition sharing exactly one terminal."""
    shared = set(first.terminals) & set(second.terminals)
    if len(shared) != 1:
        raise MalformedTree(
            f"series children {first.terminals} and {second.terminals} "
            f"must share exactly one terminal"
        )
    (z,) = shared
    return SPNode(SERIES, (first.other(z), second.other(z)), (first, second))


def parallel(first: SPNode, second: SPNode) -> SPNode:
    """Parallel composition of two parts with the same terminal pair."""
    if set(first.terminals) != set(second.terminals):
        raise MalformedTree(
            f"parallel children {first.terminals} and {second.terminals} "
            f"must share their terminal pair"
        )
    return SPNode(PARALLEL, first.terminals, (first, second))


def middle(node: SPNode) -> Vertex:
    """The vertex a series node's children share."""
    if node.kind != SERIES:
        raise MalformedTree("only series nodes have a middle vertex")
    first, second = node.children
    (z,) = set(first.terminals) & set(second.terminals)
    return z


def reorient(node: SPNode, x: Vertex, y: Vertex) -> SPNode:
    """Same subgraph with terminals presented as (x, y)."""
    if node.terminals == (x, y):
        return node
    if node.terminals != (y, x):
        raise MalformedTree(f"cannot orient {node.terminals} as {(x, y)}")
    if node.kind == LEAF:
        return SPNode(LEAF, (x, y))
    if node.kind == SERIES:
        return SPNode(SERIES, (x, y), tuple(reversed(node.children)))
    return SPNode(PARALLEL, (x, y), node.children)


def preorder(root: SPNode) -> Iterator[SPNode]:
    """Nodes parent first, children left to right."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def postorder(root: SPNode) -> list[SPNode]:
    """Nodes with every child before its parent; children left to right."""
    out: list[SPNode] = []
    stack: list[tuple[SPNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded or not node.children:
            out.append(node)
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            stack.append((child, False))
    return out


def _check_local(node: SPNode) -> None:
    """Composition invariants that only look at a node and its children."""
    if node.kind == LEAF:
        if node.children or len(node.terminals) != 2 or node.x == node.y:
            raise MalformedTree(f"bad leaf {node.terminals}")
        return
    if node.kind not in (SERIES, PARALLEL) or len(node.children) != 2:
        raise MalformedTree(f"internal node {node.terminals} needs two children")
    first, second = node.children
    if node.kind == PARALLEL:
        if {first.x, first.y} != set(node.terminals) or {second.x, second.y} != set(
            node.terminals
        ):
            raise MalformedTree(f"parallel node {node.terminals} has foreign children")
        return
    shared = {first.x, first.y} & {second.x, second.y}
    if len(shared) != 1:
        raise MalformedTree(f"series node {node.terminals} children share {shared}")
    (z,) = shared
    if (first.other(z), second.other(z)) != node.terminals:
        raise MalformedTree(f"series node {node.terminals} has misplaced children")


def validate_tree(root: SPNode) -> None:
    """Check every composition invariant, spans included.

    Raises:
        MalformedTree: On the first violation found
    """
    spans: dict = {}
    for node in postorder(root):
        _check_local(node)
        if node.kind == LEAF:
            spans[node] = frozenset(node.terminals)
            continue
        first, second = node.children
        s1, s2 = spans.pop(first), spans.pop(second)
        common = s1 & s2
        if node.kind == SERIES and common != {middle(node)}:
            raise MalformedTree(
                f"series node {node.terminals} children overlap beyond the middle"
            )
        if node.kind == PARALLEL and common != set(node.terminals):
            raise MalformedTree(
                f"parallel node {node.terminals} children overlap beyond the terminals"
            )
        spans[node] = s1 | s2


# --------------------------------------------------------------------------- #
# Recognition
# --------------------------------------------------------------------------- #


def _reduce(g: Graph, x: Vertex, y: Vertex, skip: Optional[frozenset] = None) -> SPNode:
    """Series/parallel reduction of g (minus edge `skip`) toward edge xy.

    The working multigraph keeps one merged tree per adjacent pair, so a
    parallel pair collapses the moment it appears. Non-terminal vertices
    of degree two are suppressed until none remain.
    """
    adj: dict = {v: {} for v in g.vertices}
    for u, v in g.edges:
        if skip is not None and frozenset((u, v)) == skip:
            continue
        node = leaf(u, v)
        adj[u][v] = node
        adj[v][u] = node

    terminals = (x, y)
    work = deque(v for v in g.vertices if v not in terminals and len(adj[v]) == 2)
    while work:
        w = work.popleft()
        if w not in adj or len(adj[w]) != 2:
            continue
        (u, tu), (v, tv) = adj[w].items()
        del adj[w]
        del adj[u][w]
        del adj[v][w]
        merged = series(reorient(tu, u, w), reorient(tv, w, v))
        existing = adj[u].get(v)
        if existing is not None:
            merged = parallel(existing, merged)
        adj[u][v] = merged
        adj[v][u] = merged
        for t in (u, v):
            if t not in terminals and len(adj[t]) == 2:
                work.append(t)

    if len(adj) == 2 and y in adj[x]:
        return reorient(adj[x][y], x, y)
    stuck = [v for v in adj if v not in terminals]
    raise NotSeriesParallel(
        f"reduction toward {x!r}-{y!r} stopped with {len(adj)} vertices left"
        + (f" (e.g. {stuck[0]!r} of degree {len(adj[stuck[0]])})" if stuck else "")
    )


def recognize_sp(g: Graph, x: Vertex, y: Vertex) -> SPNode:
    """Build the SP-tree of the 2-terminal graph (g, (x, y)).

    Args:
        g: Connected simple graph
        x: First terminal
        y: Second terminal, distinct from x

    Returns:
        SP-tree whose root has terminals (x, y) and realizes g exactly

    Raises:
        NotSeriesParallel: If g is not series-parallel with terminals x, y
        Disconnected: If g is not connected
    """
    g.index(x)
    g.index(y)
    if x == y:
        raise NotSeriesParallel("terminals must be distinct")
    if not is_connected(g):
        raise Disconnected("recognition needs a connected graph")
    return _reduce(g, x, y)


def sp_tree_for_edge(g: Graph, e: tuple) -> SPNode:
    """SP-tree rooted at leaf(xy) in parallel with the rest of g.

    Raises:
        NotAnEdge: If e is not an edge of g
        NotSeriesParallel: If g minus xy is not 2-terminal SP at (x, y)
    """
    x, y = e
    if not g.has_edge(x, y):
        raise NotAnEdge(f"{x!r}-{y!r} is not an edge")
    if g.m == 1:
        return leaf(x, y)
    try:
        rest = _reduce(g, x, y, skip=frozenset((x, y)))
    except NotSeriesParallel as exc:
        raise NotSeriesParallel(f"g - {x!r}{y!r}: {exc}") from exc
    return SPNode(PARALLEL, (x, y), (leaf(x, y), rest))


# --------------------------------------------------------------------------- #
# Realization
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class TwoTerminalGraph:
    """A graph with terminal pair and, when known, its composition tree."""

    graph: Graph
    terminals: tuple
    tree: Optional[SPNode] = None


def realize(root: SPNode) -> TwoTerminalGraph:
    """The 2-terminal graph a tree denotes.

    Parallel duplicates of an edge collapse to one simple edge. Vertices
    are ordered by first appearance among the leaves, left to right.

    Raises:
        MalformedTree: If a node breaks a local composition invariant
    """
    vertices: dict = {}
    edges = []
    for node in preorder(root):
        _check_local(node)
        if node.kind == LEAF:
            for v in node.terminals:
                vertices.setdefault(v, None)
            edges.append(node.terminals)
    graph = simplify_multigraph(list(vertices), edges)
    return TwoTerminalGraph(graph=graph, terminals=root.terminals, tree=root)
