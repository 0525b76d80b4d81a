"""Block-cut tree of a connected graph.

Blocks are the biconnected components, bridges included as two-vertex
blocks. A single-vertex graph has one trivial block.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import networkx as nx

from graph import Disconnected, Graph, Vertex, is_connected


@dataclass(frozen=True)
class BlockCutTree:
    """Blocks, cut vertices and their incidence.

    Attributes:
        blocks: Vertex sets, ordered by their smallest vertex position
        cut_vertices: Vertices lying in more than one block
        incidence: (block index, cut vertex) pairs, the bipartite tree edges
    """

    blocks: tuple
    cut_vertices: frozenset
    incidence: tuple

    @cached_property
    def _blocks_at(self) -> dict:
        at: dict = {}
        for b, c in self.incidence:
            at.setdefault(c, []).append(b)
        return {c: tuple(bs) for c, bs in at.items()}

    @cached_property
    def _cuts_of(self) -> dict:
        of: dict = {b: [] for b in range(len(self.blocks))}
        for b, c in self.incidence:
            of[b].append(c)
        return {b: tuple(cs) for b, cs in of.items()}

    def blocks_at(self, cut: Vertex) -> tuple:
        """Indices of the blocks containing a cut vertex."""
        return self._blocks_at.get(cut, ())

    def cuts_of(self, block: int) -> tuple:
        """Cut vertices of a block, in graph order."""
        return self._cuts_of[block]

    def preorder(self, start: int) -> list[tuple[int, Optional[Vertex]]]:
        """Blocks in preorder of the tree rooted at block `start`.

        Each entry is (block index, entry cut vertex); the entry of the
        starting block is None. The entry cut vertex of a block is the one
        on its path toward the starting block.
        """
        order: list[tuple[int, Optional[Vertex]]] = []
        visited = {start}
        stack: list[tuple[int, Optional[Vertex]]] = [(start, None)]
        while stack:
            block, entry = stack.pop()
            order.append((block, entry))
            children = []
            for cut in self.cuts_of(block):
                if cut == entry:
                    continue
                for nxt in self.blocks_at(cut):
                    if nxt not in visited:
                        visited.add(nxt)
                        children.append((nxt, cut))
            stack.extend(reversed(children))
        return order


def block_cut_tree(g: Graph) -> BlockCutTree:
    """Decompose a connected graph into blocks and cut vertices.

    Raises:
        Disconnected: If g is empty or not connected
    """
    if g.n == 0 or not is_connected(g):
        raise Disconnected("block-cut tree needs a connected, non-empty graph")
    if g.n == 1:
        return BlockCutTree((frozenset(g.vertices),), frozenset(), ())

    nxg = g.to_networkx()
    components = [frozenset(c) for c in nx.biconnected_components(nxg)]
    blocks = tuple(
        sorted(components, key=lambda b: sorted(g.index(v) for v in b))
    )
    cut_vertices = frozenset(nx.articulation_points(nxg))
    ordered_cuts = sorted(cut_vertices, key=g.index)
    incidence = tuple(
        (b, c) for b, block in enumerate(blocks) for c in ordered_cuts if c in block
    )
    return BlockCutTree(blocks, cut_vertices, incidence)
