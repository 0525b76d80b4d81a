"""Tests for the ctw command line and its input formats."""

import json

import pytest

from cli import (
    EXIT_OK,
    EXIT_UNSOLVABLE,
    EXIT_USAGE,
    build_arg_parser,
    fit_slope,
    main,
)
from cli.formats import ParseError, format_edge_list, parse_edge_list
from generators import gen_named
from graph import build_graph


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


class TestParseEdgeList:
    """Test parse_edge_list() on the accepted dialects."""

    def test_plain_pairs_with_comments(self):
        """Should read one edge per line and drop # comments."""
        g = parse_edge_list("# square\na b\nb c  # middle\nc d\nd a\n")
        assert g.vertices == ("a", "b", "c", "d")
        assert g.m == 4

    def test_count_header(self):
        """Should take a leading 'n m' line as a header when it fits."""
        g = parse_edge_list("3 2\n1 2\n2 3\n")
        assert g.vertices == ("1", "2", "3")
        assert g.m == 2

    def test_header_declares_isolated_vertex(self):
        """Should add header-declared vertices that no edge touches."""
        g = parse_edge_list("3 1\n1 2\n")
        assert g.n == 3

    def test_zero_based_header(self):
        """Should accept ids 0..n-1 under a count header."""
        g = parse_edge_list("3 2\n0 1\n1 2\n")
        assert g.vertices == ("0", "1", "2")

    def test_numeric_first_edge_is_not_a_header(self):
        """A numeric first line with the wrong edge count is an edge."""
        g = parse_edge_list("1 2\n2 3\n3 1\n")
        assert g.m == 3

    def test_ids_outside_header_range_make_it_an_edge(self):
        """'2 1' over the ids {1, 3} is the path 2-1-3, not a header."""
        g = parse_edge_list("2 1\n1 3\n")
        assert set(g.vertices) == {"1", "2", "3"}
        assert g.m == 2

    def test_named_ids_need_exact_count(self):
        """Named ids must number exactly n for a header reading."""
        g = parse_edge_list("3 1\na b\n")
        assert set(g.vertices) == {"3", "1", "a", "b"}
        assert g.m == 2

    @pytest.mark.parametrize("name", ["c", "p", "e"])
    def test_keyword_named_vertices(self, name):
        """Vertex ids that spell DIMACS keywords are ordinary vertices."""
        g = parse_edge_list(f"{name} x\nx y\ny z\nz {name}\n")
        assert g.n == 4
        assert g.m == 4
        assert name in g

    def test_square_with_vertex_c(self):
        """A plain 'c d' line is an edge, not a comment."""
        g = parse_edge_list("a b\nb c\nc d\nd a\n")
        assert g.m == 4

    def test_p_pair_is_an_edge(self):
        """'p q' with two tokens is an edge in a plain list."""
        g = parse_edge_list("p q\nq r\n")
        assert g.vertices == ("p", "q", "r")

    def test_dimacs(self):
        """Should read c comments, the p header and e lines."""
        g = parse_edge_list("c a triangle\np tw 3 3\ne 1 2\ne 2 3\ne 3 1\n")
        assert g.m == 3

    def test_dimacs_bare_pairs(self):
        """Bare 'u v' lines are accepted under a p header."""
        g = parse_edge_list("p edge 3 2\n1 2\ne 2 3\n")
        assert g.vertices == ("1", "2", "3")

    def test_dimacs_second_header(self):
        """Should reject a second p header."""
        with pytest.raises(ParseError, match="second"):
            parse_edge_list("p edge 2 1\np edge 2 1\n1 2\n")

    def test_header_count_mismatch(self):
        """Should reject a p header whose edge count is wrong."""
        with pytest.raises(ParseError, match="declares 3 edges"):
            parse_edge_list("p edge 3 3\n1 2\n")

    def test_header_vertex_mismatch(self):
        """Should reject a p header whose named vertex count is wrong."""
        with pytest.raises(ParseError, match="declares 4 vertices"):
            parse_edge_list("p edge 4 1\na b\n")

    def test_bad_line(self):
        """Should name the line of a malformed edge."""
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list("a b\na b c d\n")

    def test_duplicates_rejected_without_simplify(self):
        """Should reject a repeated edge unless simplifying."""
        with pytest.raises(ParseError):
            parse_edge_list("a b\nb a\n")

    def test_simplify(self):
        """Should collapse duplicates and drop self-loops on request."""
        g = parse_edge_list("a b\nb a\nb b\nb c\n", simplify=True)
        assert g.m == 2

    def test_generated_output_reads_back(self):
        """format_edge_list() output parses to the same graph shape."""
        g = gen_named("fan-4")
        back = parse_edge_list(format_edge_list(g))
        assert (back.n, back.m) == (g.n, g.m)

    @pytest.mark.parametrize(
        "vertices, edges",
        [
            (["c", "d", "e"], [("c", "d"), ("d", "e")]),
            ([5, 9, 12], [(5, 9), (9, 12), (12, 5)]),
            (["p", "q", "r", "s"], [("p", "q"), ("q", "r"), ("r", "s"), ("s", "p")]),
        ],
    )
    def test_format_survives_any_ids(self, vertices, edges):
        """The p-header output reads back whatever the vertex ids are."""
        g = build_graph(vertices, edges)
        back = parse_edge_list(format_edge_list(g))
        assert back.vertices == tuple(str(v) for v in vertices)
        assert back.m == g.m

    def test_headerless_format(self):
        """format_edge_list(header=False) writes bare pairs."""
        g = build_graph(["a", "b"], [("a", "b")])
        assert format_edge_list(g, header=False) == "a b\n"


class TestArgParser:
    """Test build_arg_parser()."""

    def test_common_flags_after_subcommand(self):
        """Shared flags parse after the subcommand."""
        args = build_arg_parser().parse_args(
            ["solve", "g.txt", "--jobs", "2", "--no-witness", "--cap-slack", "5"]
        )
        assert args.jobs == 2
        assert args.witness is False
        assert args.cap_slack == 5

    def test_verify_needs_layout(self, capsys):
        """verify without a layout is a usage error."""
        assert main(["verify", "g.txt"]) == EXIT_USAGE

    def test_help(self, capsys):
        """--help exits cleanly."""
        assert main(["--help"]) == EXIT_OK

    def test_version(self, capsys):
        """--version prints the package version."""
        assert main(["--version"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("ctw 0.")

    def test_no_command(self, capsys):
        """A missing subcommand is a usage error."""
        assert main([]) == EXIT_USAGE

    def test_bad_jobs(self, capsys):
        """--jobs must be positive."""
        assert main(["solve", "g.txt", "--jobs", "0"]) == EXIT_USAGE


class TestSolve:
    """Test `ctw solve`."""

    def test_square(self, tmp_path, capsys):
        """A 4-cycle solves to 2 with a full witness."""
        path = write(tmp_path, "c4.txt", "a b\nb c\nc d\nd a\n")
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_OK
        assert report["ctw"] == 2
        assert report["within_bound"] is True
        assert len(report["witness"]) == 4
        assert report["start_block"] == 0

    def test_path(self, tmp_path, capsys):
        """A numeric path is not mistaken for a header."""
        path = write(tmp_path, "p5.txt", "1 2\n2 3\n3 4\n4 5\n")
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_OK
        assert report["ctw"] == 1
        assert len(report["blocks"]) == 4
        assert report["blocks"][0]["entry"] is None

    def test_k4_names_block(self, tmp_path, capsys):
        """A K4 block is reported with its vertex names."""
        path = write(tmp_path, "k4.txt", "a b\na c\na d\nb c\nb d\nc d\n")
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_UNSOLVABLE
        assert report["status"] == "error"
        assert report["error"]["type"] == "NotTreewidth2"
        assert report["error"]["block"] == ["a", "b", "c", "d"]

    def test_disconnected(self, tmp_path, capsys):
        """Disconnected input exits with a usage error."""
        path = write(tmp_path, "two.txt", "a b\nc d\n")
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_USAGE
        assert report["error"]["type"] == "Disconnected"

    def test_missing_file(self, tmp_path, capsys):
        """A missing file is a parse error."""
        code, report = run(capsys, ["solve", str(tmp_path / "nope.txt")])
        assert code == EXIT_USAGE
        assert report["error"]["type"] == "ParseError"

    def test_text_format(self, tmp_path, capsys):
        """Text format prints the one-line summary."""
        path = write(tmp_path, "c4.txt", "a b\nb c\nc d\nd a\n")
        code, out = run(capsys, ["solve", path, "--format", "text"])
        assert code == EXIT_OK
        assert out.startswith("ctw = 2")

    def test_json_instance_input(self, tmp_path, capsys):
        """JSON instances are accepted."""
        doc = {"vertices": [1, 2, 3], "solid_edges": [[1, 2], [2, 3], [1, 3]]}
        path = write(tmp_path, "tri.json", json.dumps(doc))
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_OK
        assert report["ctw"] == 2

    def test_dot_echo(self, tmp_path, capsys):
        """--dot echoes the graph to stderr."""
        path = write(tmp_path, "e.txt", "a b\n")
        main(["solve", path, "--dot"])
        assert '"a" -- "b";' in capsys.readouterr().err

    def test_same_input_same_report(self, tmp_path, capsys):
        """Reports are deterministic apart from timing."""
        path = write(tmp_path, "g.txt", format_edge_list(gen_named("two-triangles")))
        _, first = run(capsys, ["solve", path])
        _, second = run(capsys, ["solve", path])
        first.pop("wall_time_ms")
        second.pop("wall_time_ms")
        assert first == second

    def test_ids_outside_header_range(self, tmp_path, capsys):
        """'2 1' before an edge to vertex 3 is the path 2-1-3."""
        path = write(tmp_path, "p3.txt", "2 1\n1 3\n")
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_OK
        assert (report["n"], report["m"]) == (3, 2)
        assert report["ctw"] == 1

    @pytest.mark.parametrize("name", ["c", "p", "e"])
    def test_keyword_vertex_names(self, tmp_path, capsys, name):
        """Vertices named like DIMACS keywords solve as plain edges."""
        path = write(tmp_path, "c4.txt", f"{name} x\nx y\ny z\nz {name}\n")
        code, report = run(capsys, ["solve", path])
        assert code == EXIT_OK
        assert report["ctw"] == 2
        assert name in report["witness"]

    def test_jobs_match_serial(self, tmp_path, capsys):
        """Per-block workers give the same report as a serial run."""
        path = write(tmp_path, "g.txt", format_edge_list(gen_named("two-triangles")))
        _, serial = run(capsys, ["solve", path])
        _, pooled = run(capsys, ["solve", path, "--jobs", "2"])
        serial.pop("wall_time_ms")
        pooled.pop("wall_time_ms")
        assert pooled == serial


class TestOracle:
    """Test `ctw oracle`."""

    def test_triangle(self, tmp_path, capsys):
        """Plain edge lists default to unrooted ctw."""
        path = write(tmp_path, "tri.txt", "x y\ny z\nz x\n")
        code, report = run(capsys, ["oracle", path])
        assert code == EXIT_OK
        assert report["mode"] == "ctw"
        assert report["value"] == 2

    def test_edge_with_fictive_roots(self, tmp_path, capsys):
        """Isolated roots with fictive edges switch to ectvs."""
        path = write(tmp_path, "e.txt", "x y\n")
        code, report = run(capsys, [
            "oracle", path,
            "--isolated", "r1,r2",
            "--fictive", "y-r1,y-r2",
            "--roots", "x,r1,r2",
        ])
        assert code == EXIT_OK
        assert report["mode"] == "ectvs"
        assert report["value"] == 3

    def test_uncovered_component(self, tmp_path, capsys):
        """A rootless component has no connected layout."""
        path = write(tmp_path, "two.txt", "a b\nc d\n")
        code, report = run(capsys, ["oracle", path])
        assert code == EXIT_UNSOLVABLE
        assert report["error"]["type"] == "NoConnectedLayout"

    def test_treewidth_mode(self, tmp_path, capsys):
        """--tw reports plain treewidth."""
        path = write(tmp_path, "k4.txt", "a b\na c\na d\nb c\nb d\nc d\n")
        code, report = run(capsys, ["oracle", path, "--tw"])
        assert code == EXIT_OK
        assert report["value"] == 3

    def test_too_large(self, tmp_path, capsys):
        """Inputs above --oracle-limit are refused."""
        path = write(tmp_path, "p.txt", format_edge_list(gen_named("path-6")))
        code, report = run(capsys, ["oracle", path, "--oracle-limit", "5"])
        assert code == EXIT_UNSOLVABLE
        assert report["error"]["type"] == "TooLarge"

    def test_bad_fictive_token(self, tmp_path, capsys):
        """Fictive edges must be u-v pairs."""
        path = write(tmp_path, "e.txt", "x y\n")
        code, _ = run(capsys, ["oracle", path, "--fictive", "x"])
        assert code == EXIT_USAGE


class TestCompare:
    """Test `ctw compare`."""

    def test_small_sp_run(self, capsys):
        """A small compare run finds no mismatches."""
        code, report = run(capsys, ["compare", "--trials", "20", "--max-n", "7"])
        assert code == EXIT_OK
        assert report["instances"] == 20
        assert report["mismatches"] == []

    def test_tables(self, capsys):
        """--tables audits DP table entries."""
        code, report = run(
            capsys, ["compare", "--trials", "5", "--max-n", "6", "--tables"]
        )
        assert code == EXIT_OK
        assert report["tables_checked"] > 0

    def test_corpus_directory(self, tmp_path, capsys):
        """Every file of a corpus directory is compared."""
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "c4.txt").write_text("a b\nb c\nc d\nd a\n")
        (corpus / "tail.txt").write_text(format_edge_list(gen_named("triangle-tail")))
        code, report = run(capsys, ["compare", "--corpus", str(corpus)])
        assert code == EXIT_OK
        assert report["instances"] == 2


class TestGen:
    """Test `ctw gen`."""

    def test_edge_list_to_stdout(self, capsys):
        """The generated graph goes to stdout, the summary to stderr."""
        code = main(["gen", "--kind", "named", "--name", "cycle-5"])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        g = parse_edge_list(captured.out)
        assert (g.n, g.m) == (5, 5)
        assert "generated n=5" in captured.err

    def test_seeded_output_is_stable(self, tmp_path, capsys):
        """Same seed, same file."""
        first, second = tmp_path / "a.txt", tmp_path / "b.txt"
        main(["gen", "--kind", "tw2", "--seed", "5", "--out", str(first)])
        main(["gen", "--kind", "tw2", "--seed", "5", "--out", str(second)])
        assert first.read_text() == second.read_text()

    def test_json_output(self, tmp_path, capsys):
        """--as json writes an instance document."""
        out = tmp_path / "apex.json"
        main(["gen", "--kind", "apex", "--k", "2", "--as", "json", "--out", str(out)])
        doc = json.loads(out.read_text())
        assert len(doc["vertices"]) == 8

    def test_named_needs_name(self, capsys):
        """--kind named requires --name."""
        assert main(["gen", "--kind", "named"]) == EXIT_USAGE

    def test_unknown_name(self, capsys):
        """Unknown names are a usage error."""
        assert main(["gen", "--kind", "named", "--name", "petersen"]) == EXIT_USAGE


class TestVerify:
    """Test `ctw verify`."""

    def test_valid_layout(self, tmp_path, capsys):
        """A valid layout reports its cost."""
        path = write(tmp_path, "c4.txt", "a b\nb c\nc d\nd a\n")
        code, report = run(capsys, ["verify", path, "--layout", "a,b,c,d", "--expect", "2"])
        assert code == EXIT_OK
        assert report["connected"] is True
        assert report["cost"] == 2

    def test_disconnected_prefix(self, tmp_path, capsys):
        """A layout with a gap is invalid."""
        path = write(tmp_path, "p.txt", "a b\nb c\n")
        code, report = run(capsys, ["verify", path, "--layout", "a c b"])
        assert code == EXIT_UNSOLVABLE
        assert report["status"] == "invalid"

    def test_wrong_expectation(self, tmp_path, capsys):
        """A cost other than --expect fails."""
        path = write(tmp_path, "p.txt", "a b\nb c\n")
        code, _ = run(capsys, ["verify", path, "--layout", "b,a,c", "--expect", "2"])
        assert code == EXIT_UNSOLVABLE

    def test_layout_file_and_roots(self, tmp_path, capsys):
        """Layouts can come from a file and respect roots."""
        doc = {
            "vertices": ["x", "y", "r1"],
            "solid_edges": [["x", "y"]],
            "fictive_edges": [["y", "r1"]],
            "roots": ["x", "r1"],
        }
        path = write(tmp_path, "leaf.json", json.dumps(doc))
        layout = write(tmp_path, "order.txt", "x\nr1\ny\n")
        code, report = run(capsys, ["verify", path, "--layout-file", layout])
        assert code == EXIT_OK
        assert report["cost"] == 2

    def test_unknown_vertex(self, tmp_path, capsys):
        """Layouts may only name graph vertices."""
        path = write(tmp_path, "p.txt", "a b\n")
        code, _ = run(capsys, ["verify", path, "--layout", "a,z"])
        assert code == EXIT_USAGE


class TestBench:
    """Test `ctw bench`."""

    def test_small_sizes(self, tmp_path, capsys):
        """Bench rows, slope and CSV for two small sizes."""
        csv_path = tmp_path / "bench.csv"
        code, report = run(
            capsys, ["bench", "--sizes", "10,20", "--csv", str(csv_path), "--no-witness"]
        )
        assert code == EXIT_OK
        assert len(report["rows"]) == 2
        assert report["slope"] is not None
        assert csv_path.read_text().splitlines()[0] == "n,m,ctw,ms"

    def test_slope_fit(self):
        """Slope is fitted in log-log space."""
        assert fit_slope([100, 200, 400], [1.0, 4.0, 16.0]) == pytest.approx(2.0)
        assert fit_slope([100], [1.0]) is None

    def test_bad_sizes(self, capsys):
        """Sizes must be integers."""
        assert main(["bench", "--sizes", "10,x"]) == EXIT_USAGE

    def test_tw2_family(self, capsys):
        """The tw2 family benches glued multi-block graphs."""
        code, report = run(
            capsys, ["bench", "--family", "tw2", "--sizes", "40,80", "--no-witness"]
        )
        assert code == EXIT_OK
        assert report["family"] == "tw2"
        assert len(report["rows"]) == 2

    @pytest.mark.slow
    def test_acceptance_scaling(self, capsys):
        """Default sizes scale within the biconnected slope bound."""
        code, report = run(capsys, ["bench", "--no-witness"])
        assert code == EXIT_OK
        assert report["slope"] <= 2.4
