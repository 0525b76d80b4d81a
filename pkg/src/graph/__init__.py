"""Graph core: simple graphs, extended rooted graphs, layouts and costs.

Vertex ids are opaque hashable tokens. A Graph keeps them in a stable
order and every derived structure (edge order, iteration, tie breaking)
follows that order, so results are reproducible run to run.

Connectivity is always evaluated on solid edges. Fictive edges only take
part in supporting-set reachability, and only when asked to.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Optional, Sequence, Union

import networkx as nx

logger = logging.getLogger(__name__)

Vertex = Hashable
Edge = tuple


# --------------------------------------------------------------------------- #
# Errors
# --------------------------------------------------------------------------- #


class GraphError(ValueError):
    """Raised for malformed graphs or queries that do not fit the graph."""

    pass


class SelfLoop(GraphError):
    """Raised when an edge joins a vertex to itself."""

    pass


class DuplicateEdge(GraphError):
    """Raised when the same unordered pair is given twice."""

    pass


class DuplicateVertex(GraphError):
    """Raised when a vertex id is listed twice."""

    pass


class UnknownEndpoint(GraphError):
    """Raised when an edge names a vertex that is not in the vertex list."""

    pass


class UnknownVertex(GraphError):
    """Raised when a query names a vertex that is not in the graph."""

    pass


class NotAnEdge(GraphError):
    """Raised when a pair that is not an edge is used as one."""

    pass


class LayoutMismatch(GraphError):
    """Raised when a layout is not a bijection onto the graph's vertices."""

    pass


class Disconnected(GraphError):
    """Raised when an operation needs a connected graph."""

    pass


class InvalidExtension(GraphError):
    """Raised for bad fictive edges, roots or terminals."""

    pass


# --------------------------------------------------------------------------- #
# Graph
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph over order-stable vertex tokens.

    Construct through build_graph() or simplify_multigraph(); the
    constructor itself trusts its input.

    Attributes:
        vertices: Vertex ids in their stable order
        edges: Edge pairs, each ordered by vertex position, sorted
    """

    vertices: tuple
    edges: tuple

    _index: dict = field(init=False, repr=False, compare=False)
    _adj: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {v: i for i, v in enumerate(self.vertices)}
        adj: dict = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_adj", {v: frozenset(nbrs) for v, nbrs in adj.items()}
        )

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __contains__(self, v: object) -> bool:
        return v in self._index

    def index(self, v: Vertex) -> int:
        """Position of v in the vertex order."""
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def neighbors(self, v: Vertex) -> frozenset:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def degree(self, v: Vertex) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return v in self._adj.get(u, ())

    def edge_key(self, u: Vertex, v: Vertex) -> Edge:
        """Normalize a vertex pair to the stored edge orientation."""
        return (u, v) if self.index(u) <= self.index(v) else (v, u)

    @property
    def adjacency(self) -> dict:
        """Read-only view: vertex -> frozenset of neighbours."""
        return self._adj

    @cached_property
    def edge_set(self) -> frozenset:
        """Edges as a set of frozensets, for order-free comparison."""
        return frozenset(frozenset(e) for e in self.edges)

    def induced(self, subset: Iterable[Vertex]) -> "Graph":
        """Subgraph induced by subset, keeping this graph's vertex order."""
        keep = set(subset)
        for v in keep:
            self.index(v)
        vertices = tuple(v for v in self.vertices if v in keep)
        edges = tuple(e for e in self.edges if e[0] in keep and e[1] in keep)
        return Graph(vertices, edges)

    def without_edge(self, u: Vertex, v: Vertex) -> "Graph":
        if not self.has_edge(u, v):
            raise NotAnEdge(f"{u!r}-{v!r} is not an edge")
        key = self.edge_key(u, v)
        return Graph(self.vertices, tuple(e for e in self.edges if e != key))

    def to_networkx(self) -> nx.Graph:
        nxg = nx.Graph()
        nxg.add_nodes_from(self.vertices)
        nxg.add_edges_from(self.edges)
        return nxg


def _normalized_edges(index: dict, pairs: Iterable[tuple]) -> tuple:
    edges = set()
    for u, v in pairs:
        edges.add((u, v) if index[u] <= index[v] else (v, u))
    return tuple(sorted(edges, key=lambda e: (index[e[0]], index[e[1]])))


def build_graph(vertex_ids: Sequence[Vertex], edge_pairs: Iterable[tuple]) -> Graph:
    """Build a validated simple graph.

    Args:
        vertex_ids: Vertex tokens; their order becomes the graph's order
        edge_pairs: Unordered vertex pairs

    Returns:
        The Graph

    Raises:
        DuplicateVertex: If a vertex id repeats
        SelfLoop: If a pair has equal endpoints
        UnknownEndpoint: If a pair names a vertex outside vertex_ids
        DuplicateEdge: If an unordered pair repeats
    """
    index: dict = {}
    for v in vertex_ids:
        if v in index:
            raise DuplicateVertex(f"vertex {v!r} listed twice")
        index[v] = len(index)

    seen: set = set()
    pairs = []
    for pair in edge_pairs:
        u, v = pair
        if u == v:
            raise SelfLoop(f"self-loop at {u!r}")
        for w in (u, v):
            if w not in index:
                raise UnknownEndpoint(f"edge {u!r}-{v!r} uses unknown vertex {w!r}")
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {u!r}-{v!r} given twice")
        seen.add(key)
        pairs.append((u, v))

    return Graph(tuple(index), _normalized_edges(index, pairs))


def simplify_multigraph(
    vertex_ids: Sequence[Vertex], edge_multiset: Iterable[tuple]
) -> Graph:
    """Collapse parallel edges and drop self-loops.

    Endpoints missing from vertex_ids are appended in first-seen order.
    Connected treewidth is unchanged by this simplification.
    """
    index: dict = {}
    for v in vertex_ids:
        index.setdefault(v, len(index))
    pairs = []
    for u, v in edge_multiset:
        for w in (u, v):
            index.setdefault(w, len(index))
        if u != v:
            pairs.append((u, v))
    return Graph(tuple(index), _normalized_edges(index, pairs))


def from_networkx(nxg: nx.Graph) -> Graph:
    """Convert a networkx graph, keeping its node order."""
    return simplify_multigraph(list(nxg.nodes), list(nxg.edges))


def relabel(g: Graph, mapping: dict) -> Graph:
    """Apply an injective relabeling to every vertex, keeping positions."""
    vertices = [mapping[v] for v in g.vertices]
    if len(set(vertices)) != len(vertices):
        raise DuplicateVertex("relabeling is not injective")
    return build_graph(vertices, [(mapping[u], mapping[v]) for u, v in g.edges])


def is_connected(g: Graph, subset: Optional[Iterable[Vertex]] = None) -> bool:
    """True iff the solid subgraph induced by subset is connected.

    The empty set counts as connected. subset defaults to all vertices.
    """
    keep = set(g.vertices if subset is None else subset)
    for v in keep:
        g.index(v)
    if not keep:
        return True
    start = next(iter(keep))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w in keep and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(keep)


# --------------------------------------------------------------------------- #
# Extended rooted graphs
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ExtendedRootedGraph:
    """A solid graph with fictive edges, roots and optional terminals.

    Every solid component should contain a root for a connected rooted
    layout to exist; that condition is reported by has_connected_layout()
    rather than enforced here, so the oracle can answer for such inputs.
    """

    solid: Graph
    fictive: tuple = ()
    roots: tuple = ()
    terminals: Optional[tuple] = None

    def __post_init__(self) -> None:
        g = self.solid
        seen: set = set()
        normalized = []
        for pair in self.fictive:
            u, v = pair
            if u == v:
                raise InvalidExtension(f"fictive self-loop at {u!r}")
            for w in (u, v):
                if w not in g:
                    raise InvalidExtension(f"fictive edge uses unknown vertex {w!r}")
            if g.has_edge(u, v):
                raise InvalidExtension(f"fictive edge {u!r}-{v!r} is a solid edge")
            key = frozenset((u, v))
            if key in seen:
                raise InvalidExtension(f"fictive edge {u!r}-{v!r} given twice")
            seen.add(key)
            normalized.append(g.edge_key(u, v))
        object.__setattr__(self, "fictive", tuple(normalized))

        roots = tuple(self.roots)
        if len(set(roots)) != len(roots):
            raise InvalidExtension("roots repeat")
        for r in roots:
            if r not in g:
                raise InvalidExtension(f"root {r!r} is not a vertex")
        object.__setattr__(self, "roots", roots)

        if self.terminals is not None:
            terminals = tuple(self.terminals)
            if len(terminals) != 2 or terminals[0] == terminals[1]:
                raise InvalidExtension("terminals must be two distinct vertices")
            for t in terminals:
                if t not in g:
                    raise InvalidExtension(f"terminal {t!r} is not a vertex")
            object.__setattr__(self, "terminals", terminals)

    @property
    def vertices(self) -> tuple:
        return self.solid.vertices

    @cached_property
    def extended_adjacency(self) -> dict:
        """vertex -> frozenset of solid-or-fictive neighbours."""
        if not self.fictive:
            return self.solid.adjacency
        adj = {v: set(nbrs) for v, nbrs in self.solid.adjacency.items()}
        for u, v in self.fictive:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(nbrs) for v, nbrs in adj.items()}

    def adjacency(self, use_fictive: bool = True) -> dict:
        return self.extended_adjacency if use_fictive else self.solid.adjacency

    def has_connected_layout(self) -> bool:
        """True iff every solid component contains a root."""
        unseen = set(self.solid.vertices)
        queue = deque(self.roots)
        unseen.difference_update(self.roots)
        while queue:
            u = queue.popleft()
            for w in self.solid.neighbors(u):
                if w in unseen:
                    unseen.discard(w)
                    queue.append(w)
        return not unseen


GraphLike = Union[Graph, ExtendedRootedGraph]


def as_extended(g: GraphLike) -> ExtendedRootedGraph:
    """View a plain graph as an extended graph without fictive edges or roots."""
    if isinstance(g, ExtendedRootedGraph):
        return g
    return ExtendedRootedGraph(solid=g)


# --------------------------------------------------------------------------- #
# Layouts
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Layout:
    """A total order of vertices; position 0 is placed first."""

    order: tuple

    def __post_init__(self) -> None:
        order = tuple(self.order)
        if len(set(order)) != len(order):
            raise LayoutMismatch("layout repeats a vertex")
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self) -> Iterator:
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    @cached_property
    def position(self) -> dict:
        return {v: i for i, v in enumerate(self.order)}


def as_layout(sigma: Union[Layout, Sequence[Vertex]]) -> Layout:
    return sigma if isinstance(sigma, Layout) else Layout(tuple(sigma))


def _positions(g: Graph, sigma: Layout) -> dict:
    """Position map of sigma after checking it covers exactly g's vertices."""
    pos = sigma.position
    if len(pos) != g.n or any(v not in g for v in pos):
        raise LayoutMismatch(
            f"layout of {len(pos)} vertices does not match graph of {g.n} vertices"
        )
    return pos


def is_connected_rooted_layout(g: GraphLike, sigma: Union[Layout, Sequence]) -> bool:
    """Check that sigma is a connected rooted layout of g.

    The roots must fill the first len(roots) positions in any order, and
    every later prefix must have a root in each of its solid components.
    With no roots the first vertex plays the single root.

    Raises:
        LayoutMismatch: If sigma is not a bijection onto g's vertices
    """
    ext = as_extended(g)
    sigma = as_layout(sigma)
    pos = _positions(ext.solid, sigma)
    roots = set(ext.roots)
    if not roots and len(sigma):
        roots = {sigma[0]}
    if set(sigma.order[: len(roots)]) != roots:
        return False
    for v in sigma.order[len(roots):]:
        p = pos[v]
        if not any(pos[w] < p for w in ext.solid.neighbors(v)):
            return False
    return True


def is_connected_layout(g: Graph, sigma: Union[Layout, Sequence]) -> bool:
    """Unrooted form: every prefix of sigma induces a connected subgraph."""
    return is_connected_rooted_layout(as_extended(g).solid, sigma)


# --------------------------------------------------------------------------- #
# Supporting sets and cost
# --------------------------------------------------------------------------- #


def supporting_set(
    g: GraphLike,
    sigma: Union[Layout, Sequence],
    v: Vertex,
    use_fictive: bool = True,
) -> frozenset:
    """Earlier vertices reachable from v through later vertices only.

    Let C be the vertices reachable from v while stepping only on vertices
    placed after v. The result is every vertex placed before v that is
    adjacent to C or to v.

    Raises:
        UnknownVertex: If v is not in the graph
        LayoutMismatch: If sigma does not match the graph
    """
    ext = as_extended(g)
    sigma = as_layout(sigma)
    pos = _positions(ext.solid, sigma)
    if v not in pos:
        raise UnknownVertex(f"unknown vertex {v!r}")
    adj = ext.adjacency(use_fictive)
    p = pos[v]
    seen = {v}
    support = set()
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w in seen:
                continue
            seen.add(w)
            if pos[w] < p:
                support.add(w)
            else:
                queue.append(w)
    return frozenset(support)


def supporting_sizes(
    g: GraphLike,
    sigma: Union[Layout, Sequence],
    use_fictive: bool = True,
) -> dict:
    """Sizes of all supporting sets in one reverse sweep.

    Vertices are added from last to first. Each union-find component of
    the added vertices carries its boundary: the not-yet-added vertices
    adjacent to it. When v is added, S(v) is the merged boundary of v and
    the components it touches, minus v itself.
    """
    ext = as_extended(g)
    sigma = as_layout(sigma)
    pos = _positions(ext.solid, sigma)
    adj = ext.adjacency(use_fictive)

    parent: dict = {}
    boundary: dict = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    sizes: dict = {}
    for i in range(len(sigma) - 1, -1, -1):
        v = sigma[i]
        parent[v] = v
        bound = {w for w in adj[v] if pos[w] < i}
        for w in adj[v]:
            if pos[w] <= i:
                continue
            r = find(w)
            if r == v:
                continue
            other = boundary.pop(r)
            if len(other) > len(bound):
                bound, other = other, bound
            bound |= other
            parent[r] = v
        bound.discard(v)
        boundary[v] = bound
        sizes[v] = len(bound)
    return sizes


def layout_cost(
    g: GraphLike,
    sigma: Union[Layout, Sequence],
    use_fictive: bool = True,
) -> int:
    """Largest supporting-set size over all vertices, roots included."""
    sizes = supporting_sizes(g, sigma, use_fictive)
    return max(sizes.values(), default=0)


from graph.blocks import BlockCutTree, block_cut_tree  # noqa: E402

__all__ = [
    "BlockCutTree",
    "Disconnected",
    "DuplicateEdge",
    "DuplicateVertex",
    "Edge",
    "ExtendedRootedGraph",
    "Graph",
    "GraphError",
    "GraphLike",
    "InvalidExtension",
    "Layout",
    "LayoutMismatch",
    "NotAnEdge",
    "SelfLoop",
    "UnknownEndpoint",
    "UnknownVertex",
    "Vertex",
    "as_extended",
    "as_layout",
    "block_cut_tree",
    "build_graph",
    "from_networkx",
    "is_connected",
    "is_connected_layout",
    "is_connected_rooted_layout",
    "layout_cost",
    "relabel",
    "simplify_multigraph",
    "supporting_set",
    "supporting_sizes",
]
