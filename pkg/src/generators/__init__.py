"""Seeded instance generators.

Random series-parallel graphs from random composition trees, treewidth-2
graphs glued from such blocks, the apex-over-binary-tree family, named
small graphs, and exhaustive small graphs from the networkx atlas.

Every generator is a pure function of its arguments and seed. Vertices
are integers; random SP graphs use 0 and 1 as terminals.
"""

from __future__ import annotations

import random
import re
from typing import Callable

import networkx as nx

from graph import Graph, build_graph, from_networkx, is_connected
from sptree import (
    LEAF,
    PARALLEL,
    SERIES,
    SPNode,
    TwoTerminalGraph,
    leaf,
    realize,
)

# Largest vertex count the networkx graph atlas covers.
ATLAS_MAX_N: int = 7


class UnknownName(ValueError):
    """Raised when gen_named() does not recognize a name."""

    pass


# --------------------------------------------------------------------------- #
# Random series-parallel graphs
# --------------------------------------------------------------------------- #


def _random_tree(rng: random.Random, edges: int, x: int, y: int, next_id: int) -> tuple:
    """Random composition tree with `edges` leaves between x and y.

    Each internal node splits its edge budget uniformly and is series or
    parallel by a fair coin. Returns (tree, next unused vertex id).
    """
    # frames[i] = [kind, x, y, child indices]; children get larger indices.
    frames: list[list] = []
    stack = [(edges, x, y, None)]
    while stack:
        m, a, b, parent = stack.pop()
        idx = len(frames)
        if parent is not None:
            frames[parent][3].append(idx)
        if m == 1:
            frames.append([LEAF, a, b, []])
            continue
        m1 = rng.randint(1, m - 1)
        if rng.random() < 0.5:
            z = next_id
            next_id += 1
            frames.append([SERIES, a, b, []])
            stack.append((m - m1, z, b, idx))
            stack.append((m1, a, z, idx))
        else:
            frames.append([PARALLEL, a, b, []])
            stack.append((m - m1, a, b, idx))
            stack.append((m1, a, b, idx))

    nodes: list = [None] * len(frames)
    for idx in range(len(frames) - 1, -1, -1):
        kind, a, b, children = frames[idx]
        if kind == LEAF:
            nodes[idx] = leaf(a, b)
        else:
            nodes[idx] = SPNode(kind, (a, b), tuple(nodes[c] for c in children))
    return nodes[0], next_id


def gen_random_sp(
    target_edges: int, seed: int = 0, biconnected: bool = False
) -> TwoTerminalGraph:
    """Random 2-terminal series-parallel graph.

    Parallel duplicates from the composition are collapsed, so the result
    may have fewer than target_edges edges.

    Args:
        target_edges: Leaves of the composition tree (>= 1)
        seed: Random seed
        biconnected: Make the root leaf(0, 1) in parallel with the rest,
            which yields a biconnected graph

    Returns:
        TwoTerminalGraph with terminals (0, 1) and its composition tree
    """
    if target_edges < 1:
        raise ValueError("target_edges must be at least 1")
    rng = random.Random(seed)
    if biconnected and target_edges >= 2:
        rest, _ = _random_tree(rng, target_edges - 1, 0, 1, 2)
        tree = SPNode(PARALLEL, (0, 1), (leaf(0, 1), rest))
    else:
        tree, _ = _random_tree(rng, target_edges, 0, 1, 2)
    return realize(tree)


# --------------------------------------------------------------------------- #
# Structured families
# --------------------------------------------------------------------------- #


def gen_apex_binary_tree(k: int) -> Graph:
    """Complete binary tree of height k plus an apex over its leaves.

    Tree vertices are heap-indexed 0 .. 2^(k+1) - 2; the apex is
    2^(k+1) - 1.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    size = 2 ** (k + 1) - 1
    apex = size
    edges = [((i - 1) // 2, i) for i in range(1, size)]
    first_leaf = 2**k - 1
    edges += [(v, apex) for v in range(first_leaf, size)]
    return build_graph(list(range(size + 1)), edges)


def gen_tw2(blocks: int, block_size: int, seed: int = 0) -> Graph:
    """Connected treewidth-2 graph glued from random SP blocks.

    Each new block is a biconnected random SP graph with block_size
    composition leaves; one of its vertices is identified with a random
    vertex already present.
    """
    if blocks < 1:
        raise ValueError("blocks must be at least 1")
    if block_size < 1:
        raise ValueError("block_size must be at least 1")
    rng = random.Random(seed)
    vertices: list[int] = []
    edges: list[tuple] = []
    for b in range(blocks):
        part = gen_random_sp(block_size, rng.randrange(2**32), biconnected=True).graph
        if b == 0:
            mapping = {v: i for i, v in enumerate(part.vertices)}
        else:
            anchor_host = rng.choice(vertices)
            anchor_block = rng.choice(part.vertices)
            mapping = {anchor_block: anchor_host}
            for v in part.vertices:
                if v != anchor_block:
                    mapping[v] = len(vertices) + len(mapping) - 1
        for v in part.vertices:
            if mapping[v] >= len(vertices):
                vertices.append(mapping[v])
        edges.extend((mapping[u], mapping[v]) for u, v in part.edges)
    return build_graph(vertices, edges)


BENCH_FAMILIES: tuple[str, ...] = ("biconnected", "tw2")


def gen_bench(family: str, size: int, seed: int = 0) -> Graph:
    """Scaling-benchmark instance with roughly `size` vertices.

    "biconnected" is one random SP block; "tw2" glues blocks of about
    twenty vertices each.
    """
    if family == "biconnected":
        return gen_random_sp(2 * size, seed, biconnected=True).graph
    if family == "tw2":
        per_block = 20
        return gen_tw2(max(2, size // per_block), 2 * per_block, seed)
    raise ValueError(f"unknown bench family {family!r}; expected one of {BENCH_FAMILIES}")


def _fan(n: int) -> nx.Graph:
    g = nx.path_graph(n)
    g.add_edges_from((n, i) for i in range(n))
    return g


def _two_triangles() -> nx.Graph:
    return nx.Graph([(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])


def _triangle_tail() -> nx.Graph:
    return nx.Graph([(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)])


_SIZED: dict[str, Callable[[int], nx.Graph]] = {
    "path": nx.path_graph,
    "cycle": nx.cycle_graph,
    "star": nx.star_graph,
    "complete": nx.complete_graph,
    "wheel": nx.wheel_graph,
    "fan": _fan,
}

_FIXED: dict[str, Callable[[], nx.Graph]] = {
    "triangle": lambda: nx.cycle_graph(3),
    "diamond": nx.diamond_graph,
    "K4": lambda: nx.complete_graph(4),
    "two-triangles": _two_triangles,
    "triangle-tail": _triangle_tail,
}

_MIN_SIZE: dict[str, int] = {"cycle": 3, "wheel": 4}

_SIZED_NAME = re.compile(r"^([a-z]+(?:-[a-z]+)*)-(\d+)$")


def named_graphs() -> list[str]:
    """Names gen_named() accepts; sized families end in -n."""
    return sorted(_FIXED) + sorted(f"{name}-n" for name in _SIZED) + [
        "apex-binary-tree-k"
    ]


def gen_named(name: str) -> Graph:
    """A canonical named instance.

    Sized names: path-n, cycle-n, star-n (n leaves), complete-n,
    wheel-n (n vertices), fan-n (path on n vertices plus apex),
    apex-binary-tree-k. Fixed names: triangle, diamond, K4,
    two-triangles, triangle-tail.

    Raises:
        UnknownName: For anything else
    """
    if name in _FIXED:
        return from_networkx(_FIXED[name]())
    match = _SIZED_NAME.match(name)
    if match:
        family, size = match.group(1), int(match.group(2))
        if family == "apex-binary-tree" and size >= 1:
            return gen_apex_binary_tree(size)
        if family in _SIZED and size >= _MIN_SIZE.get(family, 1):
            return from_networkx(_SIZED[family](size))
    raise UnknownName(f"unknown graph name {name!r}; known: {', '.join(named_graphs())}")


def gen_atlas(max_n: int = 6, min_n: int = 1) -> list[Graph]:
    """Every connected graph on min_n..max_n vertices, up to isomorphism."""
    if max_n > ATLAS_MAX_N:
        raise ValueError(f"the graph atlas stops at {ATLAS_MAX_N} vertices")
    out = []
    for nxg in nx.graph_atlas_g():
        n = nxg.number_of_nodes()
        if n < min_n or n > max_n:
            continue
        g = from_networkx(nxg)
        if is_connected(g):
            out.append(g)
    return out
