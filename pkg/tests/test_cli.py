"""
End-to-end tests for the command-line interface.
"""

import io
import json
import os
import tempfile
from unittest.mock import patch

import pytest

from src.cli import EXIT_COUNTEREXAMPLE, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, build_parser, parse_graph, run
from src.graph_core import add_isolated, canonical_form, complete, disjoint_copies, graph6_decode, is_isomorphic, path
from src.verification import VERIFIERS, Verifier, _Outcome


def run_cli(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


@pytest.mark.integration
class TestCommands:
    """Test cases for each subcommand."""

    def test_spectrum(self):
        """Test eigenvalues printed one per line."""
        code, output = run_cli("spectrum", "K2,2")
        assert code == EXIT_OK
        values = [float(line) for line in output.split()]
        assert values == pytest.approx([2, 0, 0, -2], abs=1e-10)

    def test_spectrum_charpoly(self):
        """Test the exact characteristic polynomial line."""
        code, output = run_cli("spectrum", "--exact-charpoly", "K3")
        assert code == EXIT_OK
        assert output.splitlines()[-1] == "charpoly: 1 0 -3 -2"

    def test_spectrum_graph6(self):
        """Test a graph6 argument."""
        code, output = run_cli("spectrum", "g6:Bw")
        assert code == EXIT_OK
        assert len(output.splitlines()) == 3

    def test_distance(self):
        """Test σ(K_{2,2}, K_{1,3})."""
        code, output = run_cli("distance", "--norm", "l1", "K2,2", "K1,3")
        assert code == EXIT_OK
        assert output.strip() == "0.535898384862"

    def test_cs(self):
        """Test cs of the null graph on four vertices."""
        code, output = run_cli("cs", "E4")
        assert code == EXIT_OK
        lines = output.splitlines()
        assert lines[0] == "cs = 2.000000000000, minimizers: K2+2*K1"
        assert lines[1] == "exact_zero = false"
        assert lines[2].endswith("\tK2+2*K1")

    def test_cs_exact_zero(self):
        """Test a cospectral mate."""
        code, output = run_cli("--jobs", "2", "cs", "K1,4")
        assert code == EXIT_OK
        lines = output.splitlines()
        assert lines[0] == "cs = 0.000000000000, minimizers: C4+K1"
        assert lines[1] == "exact_zero = true"

    def test_cs_with_stream(self):
        """Test cs over a graph6 file written by enumerate."""
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = os.path.join(tmp_dir, "order4.g6")
            assert run_cli("enumerate", "--n", "4", "--out", path)[0] == EXIT_OK
            code, output = run_cli("--chunk-size", "3", "cs", "K2,2", "--stream", path)
        assert code == EXIT_OK
        assert output.startswith("cs = 0.535898384862, minimizers: K1,3")

    def test_enumerate(self, capsys):
        """Test graph6 lines on stdout and the count on stderr."""
        code, output = run_cli("enumerate", "--n", "5", "--edges", "2:3")
        assert code == EXIT_OK
        assert len(output.splitlines()) == 2 + 4
        assert "6 graphs of order 5" in capsys.readouterr().err

    def test_enumerate_two_edges(self):
        """Test the two-edge classes of order 6."""
        code, output = run_cli("enumerate", "--n", "6", "--edges", "2")
        assert code == EXIT_OK
        found = {canonical_form(graph6_decode(line)) for line in output.split()}
        assert found == {canonical_form(add_isolated(disjoint_copies(complete(2), 2), 2)),
                         canonical_form(add_isolated(path(3), 3))}

    def test_verify(self):
        """Test a confirmed check."""
        code, output = run_cli("verify", "--theorem", "thm_2_1", "--max-n", "5")
        assert code == EXIT_OK
        assert "status: confirmed" in output
        assert output.splitlines()[0] == "theorem: thm_2_1"

    @pytest.mark.parametrize("theorem,max_n", [("thm_4_5", 5), ("lemma_3_3", 5), ("prop_4_6", 4), ("cs_max", 4)])
    def test_verify_prints_requested_id(self, theorem, max_n):
        """Test that the theorem line repeats the requested id."""
        code, output = run_cli("verify", "--theorem", theorem, "--max-n", str(max_n))
        assert code == EXIT_OK
        assert output.splitlines()[0] == f"theorem: {theorem}"

    def test_verify_counterexample(self):
        """Test exit code 3 on a counterexample."""
        fake = Verifier("fake", "fake_alias", "always fails", 2, lambda n, long_run: _Outcome(1, complete(n), "fails"))
        with patch.dict(VERIFIERS, {"fake": fake}):
            code, output = run_cli("verify", "--theorem", "fake", "--max-n", "3")
        assert code == EXIT_COUNTEREXAMPLE
        assert "witness: A_" in output

    def test_table_csv(self):
        """Test the CSV table."""
        code, output = run_cli("table", "--max-n", "4")
        assert code == EXIT_OK
        lines = output.splitlines()
        assert lines[0] == "graph,norm,cs_bruteforce,cs_closed_form,minimizers"
        assert len(lines) == 1 + 8

    def test_table_independent_of_jobs(self):
        """Test that the CSV output is byte-identical for 1 and 8 workers."""
        code_one, single = run_cli("--jobs", "1", "table", "--max-n", "6")
        code_eight, parallel = run_cli("--jobs", "8", "table", "--max-n", "6")
        assert code_one == code_eight == EXIT_OK
        assert single == parallel

    def test_table_json(self):
        """Test the JSON table."""
        code, output = run_cli("table", "--max-n", "4", "--format", "json")
        assert code == EXIT_OK
        rows = json.loads(output)
        assert rows[0]["graph"] == "E4"
        assert rows[0]["minimizers"] == ["K2+2*K1"]


@pytest.mark.integration
class TestExitCodes:
    """Test cases for usage and runtime errors."""

    def test_usage_errors(self, capsys):
        """Test that argument errors exit with 1."""
        assert run_cli()[0] == EXIT_USAGE
        assert run_cli("distance", "--norm", "l3", "K2", "E2")[0] == EXIT_USAGE
        assert run_cli("enumerate", "--n", "x")[0] == EXIT_USAGE
        assert run_cli("--jobs", "0", "cs", "K3")[0] == EXIT_USAGE
        assert "error" in capsys.readouterr().err

    def test_runtime_errors(self, capsys):
        """Test that domain and I/O errors exit with 2 and print nothing to stdout."""
        for argv in (
            ("spectrum", "K3-x"),
            ("spectrum", "g6:C"),
            ("distance", "K3", "K4"),
            ("cs", "K1"),
            ("enumerate", "--n", "11"),
            ("verify", "--theorem", "nope", "--max-n", "4"),
            ("table", "--max-n", "12"),
            ("cs", "K3", "--stream", os.path.join(tempfile.gettempdir(), "missing-dir", "x.g6")),
        ):
            code, output = run_cli(*argv)
            assert code == EXIT_RUNTIME, argv
            assert output == ""
        assert "error:" in capsys.readouterr().err


class TestParsing:
    """Test cases for argument parsing helpers."""

    def test_parse_graph(self):
        """Test expressions and graph6 arguments."""
        assert is_isomorphic(parse_graph("K3"), parse_graph("g6:Bw"))

    def test_edge_ranges(self):
        """Test edge range parsing."""
        parser = build_parser()
        assert parser.parse_args(["enumerate", "--n", "5", "--edges", "2:3"]).edges == (2, 3)
        assert parser.parse_args(["enumerate", "--n", "5", "--edges", ":3"]).edges == (None, 3)
        assert parser.parse_args(["enumerate", "--n", "5", "--edges", "4"]).edges == 4
