"""Brute-force reference evaluators.

Exact connected (rooted, extended) vertex separation by layout search,
and treewidth as unrestricted vertex separation, for graphs small enough
to enumerate. These are the ground truth the DP is tested against.

Search works on bitmasks over dense vertex indices. When a vertex is
placed, the set of vertices after it is exactly the set still unplaced,
so its supporting set is final at that moment. That makes the running
maximum a valid lower bound for every completion, which is what the
branch-and-bound prunes on.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

from config import DEFAULT_ORACLE_LIMIT, DEFAULT_TW_LIMIT
from graph import (
    Disconnected,
    ExtendedRootedGraph,
    Graph,
    Layout,
    Vertex,
    as_extended,
    build_graph,
    is_connected,
)

logger = logging.getLogger(__name__)


class OracleError(Exception):
    """Base class for oracle failures."""

    pass


class TooLarge(OracleError):
    """Raised when an instance exceeds the enumeration limit."""

    pass


class NoConnectedLayout(OracleError):
    """Raised when some solid component contains no root."""

    pass


@dataclass(frozen=True)
class OracleResult:
    """Optimal value and one layout achieving it."""

    value: int
    layout: Layout


def _masks(ext: ExtendedRootedGraph, use_fictive: bool = True) -> tuple:
    index = {v: i for i, v in enumerate(ext.vertices)}
    solid = [0] * len(index)
    for u, v in ext.solid.edges:
        solid[index[u]] |= 1 << index[v]
        solid[index[v]] |= 1 << index[u]
    extended = list(solid)
    if use_fictive:
        for u, v in ext.fictive:
            extended[index[u]] |= 1 << index[v]
            extended[index[v]] |= 1 << index[u]
    return index, solid, extended


def _support_size(adj: list, placed: int, v: int) -> int:
    """|S(v)| when `placed` holds exactly the vertices before v."""
    comp = 1 << v
    frontier = comp
    reach = 0
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        nbrs = adj[low.bit_length() - 1]
        reach |= nbrs
        new = nbrs & ~placed & ~comp
        comp |= new
        frontier |= new
    return bin(reach & placed).count("1")


class _Search:
    """Branch-and-bound over layout extensions."""

    def __init__(self, n: int, solid: list, extended: list, connected: bool, prune: bool):
        self.n = n
        self.full = (1 << n) - 1
        self.solid = solid
        self.extended = extended
        self.connected = connected
        self.prune = prune
        self.best = n + 1
        self.best_order: list[int] = []
        self.seen: dict = {}

    def candidates(self, placed: int) -> list[int]:
        free = self.full & ~placed
        out = []
        while free:
            low = free & -free
            free ^= low
            i = low.bit_length() - 1
            if not self.connected or placed == 0 or self.solid[i] & placed:
                out.append(i)
        return out

    def run(self, placed: int, cost: int, prefix: list[int]) -> None:
        if placed == self.full:
            if cost < self.best:
                self.best = cost
                self.best_order = list(prefix)
            return
        if self.prune:
            if cost >= self.best:
                return
            if self.seen.get(placed, self.n + 1) <= cost:
                return
            self.seen[placed] = cost
        for i in self.candidates(placed):
            step = max(cost, _support_size(self.extended, placed, i))
            if self.prune and step >= self.best:
                continue
            prefix.append(i)
            self.run(placed | (1 << i), step, prefix)
            prefix.pop()


def _check_limit(n: int, limit: Optional[int], default: int) -> None:
    limit = default if limit is None else limit
    if n > limit:
        raise TooLarge(f"{n} vertices exceed the oracle limit of {limit}")


def _search(
    ext: ExtendedRootedGraph,
    start: tuple,
    connected: bool,
    prune: bool,
) -> OracleResult:
    index, solid, extended = _masks(ext)
    vertices = ext.vertices
    n = len(vertices)

    # Root order only changes root supporting sets, and those depend only
    # on the root order, so the best root permutation is found on its own.
    root_ids = [index[r] for r in start]
    root_cost, root_order = 0, root_ids
    if root_ids:
        root_cost = n + 1
        for perm in itertools.permutations(root_ids):
            placed, cost = 0, 0
            for i in perm:
                cost = max(cost, _support_size(extended, placed, i))
                placed |= 1 << i
                if cost >= root_cost:
                    break
            else:
                root_cost, root_order = cost, list(perm)

    search = _Search(n, solid, extended, connected, prune)
    placed = 0
    for i in root_order:
        placed |= 1 << i
    search.run(placed, root_cost, list(root_order))
    if search.best > n:
        raise NoConnectedLayout("no connected rooted layout exists")
    return OracleResult(search.best, Layout(tuple(vertices[i] for i in search.best_order)))


def brute_ectvs(
    g: ExtendedRootedGraph, limit: Optional[int] = None, prune: bool = True
) -> OracleResult:
    """Best extended cost over connected rooted layouts.

    Args:
        g: Extended rooted instance
        limit: Max vertices (default DEFAULT_ORACLE_LIMIT)
        prune: Use incumbent and dominance pruning

    Raises:
        TooLarge: If g has more vertices than the limit
        NoConnectedLayout: If some solid component has no root
    """
    g = as_extended(g)
    _check_limit(g.solid.n, limit, DEFAULT_ORACLE_LIMIT)
    if not g.roots and g.solid.n:
        raise NoConnectedLayout("a rooted layout needs at least one root")
    if not g.has_connected_layout():
        raise NoConnectedLayout("some solid component contains no root")
    return _search(g, g.roots, connected=True, prune=prune)


def brute_ctw(g: Graph, limit: Optional[int] = None, prune: bool = True) -> OracleResult:
    """Connected treewidth by search over all connected layouts.

    Raises:
        TooLarge: If g has more vertices than the limit
        Disconnected: If g is empty or not connected
    """
    _check_limit(g.n, limit, DEFAULT_ORACLE_LIMIT)
    if g.n == 0 or not is_connected(g):
        raise Disconnected("connected layouts need a connected, non-empty graph")
    return _search(as_extended(g), (), connected=True, prune=prune)


def brute_tw(g: Graph, limit: Optional[int] = None, prune: bool = True) -> OracleResult:
    """Treewidth as the best cost over all layouts, connected or not.

    Raises:
        TooLarge: If g has more vertices than the limit
    """
    _check_limit(g.n, limit, DEFAULT_TW_LIMIT)
    if g.n == 0:
        return OracleResult(0, Layout(()))
    return _search(as_extended(g), (), connected=False, prune=prune)


def apex_construction(g: Graph) -> Graph:
    """g plus one new vertex adjacent to every vertex.

    The new vertex is max + 1 when all ids are integers, otherwise the
    first unused token among "apex", "apex1", "apex2", ...
    """
    ids = g.vertices
    if ids and all(isinstance(v, int) and not isinstance(v, bool) for v in ids):
        apex: Vertex = max(ids) + 1
    else:
        apex, suffix = "apex", 0
        while apex in g:
            suffix += 1
            apex = f"apex{suffix}"
    return build_graph(list(ids) + [apex], list(g.edges) + [(v, apex) for v in ids])
