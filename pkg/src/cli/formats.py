"""Input and output formats for the ctw command line.

Edge lists: one "u v" pair per line, `#` comments, vertex ids are
arbitrary tokens. An optional first line "n m" declares the counts.
Files whose first non-"c" line is a "p <kind> n m" header are read as
DIMACS/PACE: "c" comment lines and "e u v" edge lines.

Extended rooted instances use the JSON document described in
docs/formats.md and schemas/extended_instance.json.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

from graph import (
    ExtendedRootedGraph,
    Graph,
    GraphError,
    LayoutMismatch,
    Vertex,
    build_graph,
    simplify_multigraph,
)
from schema import instance_from_doc, instance_to_doc, validate_instance_doc


class ParseError(ValueError):
    """Raised when input text cannot be parsed.

    Attributes:
        line: 1-based line number, or None when not tied to a line
    """

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def _is_count(token: str) -> bool:
    return token.isdigit()


def _numbered_range(tokens: Iterable[str], n: int) -> Optional[list[str]]:
    """The id range 1..n (or 0..n-1) covering every token, if any."""
    values = [int(t) for t in tokens]
    if all(1 <= v <= n for v in values):
        return [str(i) for i in range(1, n + 1)]
    if all(0 <= v < n for v in values):
        return [str(i) for i in range(n)]
    return None


def _data_lines(text: str) -> list[tuple[int, list[str]]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            rows.append((lineno, tokens))
    return rows


def _is_dimacs(rows: list[tuple[int, list[str]]]) -> bool:
    """True when the first line that is not a `c` line is a `p` header."""
    for _, tokens in rows:
        if tokens[0] == "c":
            continue
        return (
            tokens[0] == "p"
            and len(tokens) == 4
            and _is_count(tokens[2])
            and _is_count(tokens[3])
        )
    return False


def _dimacs_pairs(rows: list[tuple[int, list[str]]]) -> tuple:
    header: Optional[tuple[int, int, int]] = None
    pairs: list[tuple[int, list[str]]] = []
    for lineno, tokens in rows:
        if tokens[0] == "c":
            continue
        if tokens[0] == "p" and len(tokens) == 4:
            if header is not None:
                raise ParseError("second 'p' header", lineno)
            header = (int(tokens[2]), int(tokens[3]), lineno)
            continue
        if tokens[0] == "e" and len(tokens) == 3:
            tokens = tokens[1:]
        if len(tokens) != 2:
            raise ParseError(f"expected 'e u v', got {len(tokens)} tokens", lineno)
        pairs.append((lineno, tokens))
    return header, pairs


def _plain_pairs(rows: list[tuple[int, list[str]]]) -> tuple:
    for lineno, tokens in rows:
        if len(tokens) != 2:
            raise ParseError(f"expected two vertex tokens, got {len(tokens)}", lineno)
    if not rows or not all(_is_count(t) for t in rows[0][1]):
        return None, rows

    # A leading "n m" line is a header only when the rest of the file fits
    # it: exactly m edges, and either all-integer ids inside 1..n (or
    # 0..n-1) or exactly n distinct named ids.
    (lineno, (n_tok, m_tok)), rest = rows[0], rows[1:]
    n, m = int(n_tok), int(m_tok)
    distinct = {t for _, pair in rest for t in pair}
    if len(rest) != m:
        return None, rows
    if all(_is_count(t) for t in distinct):
        fits = _numbered_range(distinct, n) is not None
    else:
        fits = len(distinct) == n
    return ((n, m, lineno), rest) if fits else (None, rows)


def parse_edge_list(text: str, simplify: bool = False) -> Graph:
    """Parse an edge list into a Graph.

    A file whose first non-`c` line is `p <kind> n m` is read as
    DIMACS/PACE: `c` lines are comments and edges are `e u v` (or bare
    `u v`). Any other file is a plain edge list where every line is one
    `u v` pair, whatever the tokens spell.

    Args:
        text: Edge-list text
        simplify: Collapse duplicate edges and drop self-loops instead of
            rejecting them

    Raises:
        ParseError: On malformed lines, bad headers, or (without simplify)
            duplicate edges and self-loops
    """
    rows = _data_lines(text)
    if _is_dimacs(rows):
        header, rows = _dimacs_pairs(rows)
    else:
        header, rows = _plain_pairs(rows)

    order: dict[str, None] = {}
    pairs = []
    for _, (u, v) in rows:
        order.setdefault(u, None)
        order.setdefault(v, None)
        pairs.append((u, v))

    if header is not None:
        n, m, lineno = header
        if len(pairs) != m:
            raise ParseError(f"header declares {m} edges, found {len(pairs)}", lineno)
        numbered = (
            _numbered_range(order, n) if all(_is_count(t) for t in order) else None
        )
        if numbered is not None:
            order = dict.fromkeys(numbered)
        elif len(order) != n:
            raise ParseError(f"header declares {n} vertices, found {len(order)}", lineno)

    if simplify:
        return simplify_multigraph(list(order), pairs)
    try:
        return build_graph(list(order), pairs)
    except GraphError as e:
        raise ParseError(str(e)) from e


def format_edge_list(g: Graph, header: bool = True) -> str:
    """Serialize a graph as an edge list.

    With a header the output is DIMACS style (`p edge n m`, then `e u v`
    lines), which reads back unambiguously whatever the vertex ids are.
    """
    if not header:
        return "".join(f"{u} {v}\n" for u, v in g.edges)
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def format_dot(g: Graph, name: str = "G") -> str:
    """DOT rendering of a graph, for echoing input."""
    lines = [f"graph {name} {{"]
    linked = {v for e in g.edges for v in e}
    lines.extend(f'  "{v}";' for v in g.vertices if v not in linked)
    lines.extend(f'  "{u}" -- "{v}";' for u, v in g.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_text(path: str) -> str:
    """Contents of a file, or of stdin for '-'."""
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e


def _looks_like_json(path: str, text: str) -> bool:
    return path.endswith(".json") or text.lstrip().startswith("{")


def load_instance(path: str, simplify: bool = False) -> ExtendedRootedGraph:
    """Read an edge list or an extended-instance JSON document.

    Raises:
        ParseError: If the text is neither
    """
    text = read_text(path)
    if _looks_like_json(path, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", e.lineno) from e
        return instance_from_doc(doc)
    return ExtendedRootedGraph(solid=parse_edge_list(text, simplify=simplify))


def format_instance(instance: ExtendedRootedGraph) -> str:
    doc = instance_to_doc(instance)
    validate_instance_doc(doc)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def split_tokens(text: Optional[str]) -> list[str]:
    """Split a comma- or whitespace-separated token list."""
    if not text:
        return []
    return [t for t in text.replace(",", " ").split() if t]


def resolve_tokens(vertices: Iterable[Vertex], tokens: Sequence[str]) -> list:
    """Map command-line tokens onto vertex ids by their string form.

    Raises:
        LayoutMismatch: If a token names no vertex
    """
    by_name = {str(v): v for v in vertices}
    out = []
    for t in tokens:
        if t not in by_name:
            raise LayoutMismatch(f"unknown vertex {t!r}")
        out.append(by_name[t])
    return out
