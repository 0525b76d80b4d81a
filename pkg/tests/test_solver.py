"""Tests for the connected-treewidth DP: tables, combinators and solves."""

from __future__ import annotations

import pytest

from differential import combine_series_literal, sp_corpus, tw2_corpus
from generators import gen_apex_binary_tree, gen_named, gen_random_sp, gen_tw2
from graph import (
    Disconnected,
    build_graph,
    is_connected_rooted_layout,
    layout_cost,
)
from oracle import brute_ctw
from solver import (
    SATURATED,
    NotBiconnected,
    NotTreewidth2,
    TerminalMismatch,
    cap_for,
    combine_parallel,
    combine_series,
    ctvs_block_rooted,
    ctw,
    ctw_biconnected,
    ectvs_rooted_edge,
    fold,
    leaf_table,
    rooted_edge_values,
)
from sptree import leaf, series, sp_tree_for_edge


def c4():
    return build_graph(
        ["x", "a", "b", "y"], [("x", "a"), ("a", "b"), ("b", "y"), ("y", "x")]
    )


def diamond():
    return build_graph(
        ["a", "b", "x", "y"], [("a", "b"), ("a", "x"), ("x", "b"), ("a", "y"), ("y", "b")]
    )


def assert_witness(g, result):
    assert is_connected_rooted_layout(g, result.witness)
    assert layout_cost(g, result.witness, use_fictive=False) == result.value


class TestCapFor:
    """Test cap_for()."""

    @pytest.mark.parametrize("n,cap", [(1, 2), (2, 4), (8, 8), (1000, 22)])
    def test_values(self, n, cap):
        """Cap is ceil(2 (log2 n + 1))."""
        assert cap_for(n) == cap

    def test_rejects_zero(self):
        """n must be positive."""
        with pytest.raises(ValueError):
            cap_for(0)


class TestLeafTable:
    """Test leaf_table() initialization."""

    def test_e0(self):
        """A lone edge with both ends rooted costs one."""
        assert leaf_table(("x", "y"), 8).e0 == 1

    def test_family_entries(self):
        """k extra roots on a leaf cost k + 1."""
        t = leaf_table(("x", "y"), 8)
        assert t.value("a", 3, "x") == 4
        assert t.value("b", 1, "y") == 2
        for k in range(1, 9):
            for anchor in ("x", "y"):
                assert t.value("a", k, anchor) == k + 1
                assert t.value("b", k, anchor) == k + 1

    def test_beyond_cap_saturates(self):
        """Indices past the cap read as saturated."""
        t = leaf_table(("x", "y"), 4)
        assert t.value("a", 5, "x") == SATURATED

    def test_foreign_anchor(self):
        """Anchors must be terminals of the table."""
        with pytest.raises(TerminalMismatch):
            leaf_table(("x", "y"), 4).a("z")


class TestCombinators:
    """Test combine_parallel() and combine_series()."""

    def test_path_series(self):
        """Two edges in series: a path rooted at its ends."""
        t = combine_series(leaf_table(("x", "z"), 8), leaf_table(("z", "y"), 8))
        assert t.terminals == ("x", "y")
        assert t.e0 == 2
        assert t.value("a", 1, "x") == 2

    def test_triangle_parallel(self):
        """Edge in parallel with a path is a triangle."""
        path = combine_series(leaf_table(("x", "z"), 8), leaf_table(("z", "y"), 8))
        t = combine_parallel(leaf_table(("x", "y"), 8), path)
        assert t.e0 == 2

    def test_parallel_leaves(self):
        """Parallel copies of an edge keep leaf values."""
        t = combine_parallel(leaf_table(("x", "y"), 8), leaf_table(("y", "x"), 8))
        assert t.e0 == 1
        assert t.value("a", 2, "y") == 3

    def test_square_chain_both_associations(self):
        """Series composition is associative on E0."""
        xa, ab, by = (leaf_table(e, 8) for e in (("x", "a"), ("a", "b"), ("b", "y")))
        left = combine_series(combine_series(xa, ab), by)
        right = combine_series(xa, combine_series(ab, by))
        assert left.e0 == right.e0 == 2

    def test_square_root(self):
        """The square rooted at an edge costs two."""
        chain = combine_series(
            combine_series(leaf_table(("x", "a"), 8), leaf_table(("a", "b"), 8)),
            leaf_table(("b", "y"), 8),
        )
        assert combine_parallel(leaf_table(("x", "y"), 8), chain).e0 == 2

    def test_parallel_terminal_mismatch(self):
        """Parallel tables must share both terminals."""
        with pytest.raises(TerminalMismatch):
            combine_parallel(leaf_table(("x", "y"), 8), leaf_table(("x", "z"), 8))

    def test_series_terminal_mismatch(self):
        """Series tables must share one terminal."""
        with pytest.raises(TerminalMismatch):
            combine_series(leaf_table(("a", "b"), 8), leaf_table(("c", "d"), 8))

    def test_unrepaired_series_rule_is_ill_typed(self):
        """The literal series rule asks for a missing terminal."""
        with pytest.raises(TerminalMismatch):
            combine_series_literal(leaf_table(("x", "z"), 8), leaf_table(("z", "y"), 8))

    def test_fold_matches_manual_combination(self):
        """fold() with keep returns one table per node."""
        tree = series(leaf("x", "z"), leaf("z", "y"))
        assert fold(tree, 8).e0 == 2
        tables = fold(tree, 8, keep=True)
        assert tables[tree].terminals == ("x", "y")
        assert len(tables) == 3


class TestRootedEdge:
    """Test ectvs_rooted_edge()."""

    def test_single_edge(self):
        """A lone edge costs one."""
        g = build_graph(["x", "y"], [("x", "y")])
        assert ectvs_rooted_edge(g, ("x", "y")).value == 1

    @pytest.mark.parametrize("edge", [("x", "a"), ("a", "b"), ("b", "y"), ("x", "y")])
    def test_square(self, edge):
        """Every edge of the square costs two and is placed first."""
        result = ectvs_rooted_edge(c4(), edge)
        assert result.value == 2
        assert set(result.witness[:2]) == set(edge)

    def test_diamond(self):
        """Diamond rooted at its hub edge costs two."""
        result = ectvs_rooted_edge(diamond(), ("a", "b"))
        assert result.value == 2
        assert set(result.witness[:2]) == {"a", "b"}
        assert layout_cost(diamond(), result.witness) == 2


class TestBiconnected:
    """Test ctw_biconnected()."""

    def test_triangle(self):
        """The triangle has connected treewidth two."""
        result = ctw_biconnected(gen_named("triangle"))
        assert result.value == 2
        assert_witness(gen_named("triangle"), result)

    def test_square(self):
        """Ties go to the first edge in edge order."""
        result = ctw_biconnected(c4())
        assert result.value == 2
        assert result.provenance["root_edge"] == ("x", "a")

    def test_apex_tree_matches_oracle(self):
        """Apex tree of height two agrees with brute force."""
        g = gen_apex_binary_tree(2)
        assert ctw_biconnected(g).value == brute_ctw(g).value

    def test_path_is_not_biconnected(self):
        """A path is rejected as not biconnected."""
        with pytest.raises(NotBiconnected):
            ctw_biconnected(gen_named("path-3"))

    def test_small_cap_escalates(self):
        """A cap below the answer escalates to n."""
        result = ctw_biconnected(c4(), cap=1)
        assert result.value == 2
        assert result.provenance["cap"] == 4
        assert_witness(c4(), result)

    def test_worker_pool_agrees(self):
        """Per-block worker processes give the serial answer."""
        g = gen_tw2(3, 10, seed=7)
        serial = ctw(g, witness=False)
        pooled = ctw(g, jobs=2, witness=False)
        assert pooled.value == serial.value
        assert pooled.provenance == serial.provenance


class TestRootedEdgeValues:
    """Test rooted_edge_values()."""

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_per_edge_fold(self, seed):
        """Rerooted values equal a fresh fold per edge, up to the cap."""
        g = gen_random_sp(14, seed=seed, biconnected=True).graph
        cap = cap_for(g.n)
        values = rooted_edge_values(g, cap)
        assert set(values) == {frozenset(e) for e in g.edges}
        for e in g.edges:
            direct = fold(sp_tree_for_edge(g, e), cap).e0
            assert min(values[frozenset(e)], cap + 1) == min(direct, cap + 1)

    def test_single_edge(self):
        """A one-edge graph has one value, one."""
        g = build_graph(["x", "y"], [("x", "y")])
        assert rooted_edge_values(g, 4) == {frozenset(("x", "y")): 1}

    def test_square(self):
        """Every edge of the square has value two."""
        values = rooted_edge_values(c4(), cap_for(4))
        assert set(values.values()) == {2}

    def test_agrees_with_rooted_edge_solve(self):
        """Each rerooted value is the escalated single-edge value."""
        g = diamond()
        values = rooted_edge_values(g, cap_for(g.n))
        for e in g.edges:
            assert values[frozenset(e)] == ectvs_rooted_edge(g, e, witness=False).value


class TestBlockRooted:
    """Test ctvs_block_rooted()."""

    def test_single_edge(self):
        """Rooted at y, the witness swaps to start with y."""
        g = build_graph(["x", "y"], [("x", "y")])
        result = ctvs_block_rooted(g, "y")
        assert result.value == 1
        assert tuple(result.witness) == ("y", "x")

    @pytest.mark.parametrize("name", ["triangle", "cycle-4"])
    def test_every_start(self, name):
        """Every start vertex of a small cycle costs two."""
        g = gen_named(name)
        for r in g.vertices:
            result = ctvs_block_rooted(g, r)
            assert result.value == 2
            assert result.witness[0] == r
            assert layout_cost(g, result.witness) == 2


class TestCtw:
    """Test ctw() on general treewidth-2 graphs."""

    def test_path(self):
        """A path costs one and has one block per edge."""
        result = ctw(gen_named("path-5"))
        assert result.value == 1
        assert len(result.provenance["blocks"]) == 4

    def test_two_triangles(self):
        """Two triangles sharing a vertex cost two."""
        g = gen_named("two-triangles")
        result = ctw(g)
        assert result.value == 2
        assert_witness(g, result)

    def test_triangle_with_tail(self):
        """A triangle with a pendant path costs two."""
        g = gen_named("triangle-tail")
        result = ctw(g)
        assert result.value == 2
        assert_witness(g, result)

    def test_single_vertex(self):
        """A lone vertex costs zero."""
        result = ctw(build_graph(["v"], []))
        assert result.value == 0
        assert tuple(result.witness) == ("v",)

    def test_single_edge(self):
        """A single edge costs one."""
        assert ctw(gen_named("path-2")).value == 1

    def test_k4_names_block(self):
        """A K4 block is reported with its vertices."""
        g = build_graph(
            list(range(5)),
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)],
        )
        with pytest.raises(NotTreewidth2) as info:
            ctw(g)
        assert info.value.block == (0, 1, 2, 3)

    def test_disconnected(self):
        """Disconnected graphs are rejected."""
        with pytest.raises(Disconnected):
            ctw(build_graph(["a", "b"], []))

    def test_without_witness(self):
        """witness=False returns only the value."""
        result = ctw(gen_named("cycle-5"), witness=False)
        assert result.value == 2
        assert result.witness is None

    def test_step_audit(self):
        """Auditing every step does not change the answer."""
        g = gen_random_sp(20, seed=3, biconnected=True).graph
        assert ctw(g, audit=True).value == ctw(g).value


class TestProperties:
    """Bounds, saturation and the apex-tree family."""

    def test_bound_and_lower_bound(self):
        """Values stay within the cap; cyclic graphs cost at least two."""
        for g in sp_corpus(40, 12, seed=11):
            value = ctw(g, witness=False).value
            assert value <= cap_for(g.n)
            if g.n >= 3 and g.m >= g.n:
                assert value >= 2

    def test_cap_slack_changes_nothing(self):
        """Extra cap never changes the answer."""
        for g in list(sp_corpus(25, 10, seed=5)) + list(tw2_corpus(15, 12, seed=5)):
            assert ctw(g, cap_slack=5).value == ctw(g).value

    def test_apex_tree_family_is_monotone(self):
        """Apex-tree values never drop as height grows."""
        values = [ctw(gen_apex_binary_tree(k), witness=False).value for k in range(1, 6)]
        assert values == sorted(values)
        assert values[0] == 2
