"""
Unit tests for graph enumeration and graph6 streams.
"""

import os
import tempfile
from collections import Counter

import networkx as nx
import pytest

from src.enumeration import (
    LEVEL_CACHE_SIZE,
    GraphStream,
    GraphStreamError,
    _level,
    enumerate_graphs,
    read_graph6_stream,
    write_graph6_stream,
)
from src.graph_core import (
    Graph6Error,
    add_isolated,
    canonical_form,
    complete,
    disjoint_copies,
    graph6_encode,
    path,
)


class TestEnumerateGraphs:
    """Test cases for the internal enumerator."""

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34), (6, 156)])
    def test_class_counts(self, n, count):
        """Test class counts for small orders."""
        assert enumerate_graphs(n).count() == count

    def test_counts_match_graph_atlas(self):
        """Test class counts and edge distributions against the networkx atlas."""
        atlas = Counter((g.number_of_nodes(), g.number_of_edges()) for g in nx.graph_atlas_g())
        for n in range(1, 8):
            ours = Counter((n, g.m) for g in enumerate_graphs(n))
            assert ours == Counter({key: value for key, value in atlas.items() if key[0] == n})

    @pytest.mark.slow
    def test_order_eight(self):
        """Test the 12,346 classes of order 8."""
        assert enumerate_graphs(8).count() == 12346

    def test_one_representative_per_class(self):
        """Test that no two yielded graphs are isomorphic."""
        forms = [canonical_form(g) for g in enumerate_graphs(6)]
        assert len(forms) == len(set(forms))

    def test_deterministic(self):
        """Test that repeated runs yield the same sequence."""
        first = [graph6_encode(g) for g in enumerate_graphs(5)]
        second = [graph6_encode(g) for g in enumerate_graphs(5)]
        assert first == second

    def test_stream_is_canonical(self):
        """Test that yielded graphs are canonical representatives."""
        stream = enumerate_graphs(5)
        assert isinstance(stream, GraphStream)
        assert stream.canonical
        for form, g in stream.forms():
            assert form == canonical_form(g)

    def test_edge_filters(self):
        """Test exact and ranged edge-count filters."""
        assert enumerate_graphs(5, edges=2).count() == 2
        assert enumerate_graphs(4, edges=4).count() == 2
        assert enumerate_graphs(5, edges=(None, 2)).count() == 4
        assert enumerate_graphs(5, edges=(9, None)).count() == 2
        assert sum(enumerate_graphs(6, edges=m).count() for m in range(16)) == 156

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
    def test_two_edge_classes(self, n):
        """Test that the graphs with two edges are 2K_2 and P_3 plus isolated vertices."""
        expected = {canonical_form(add_isolated(disjoint_copies(complete(2), 2), n - 4)),
                    canonical_form(add_isolated(path(3), n - 3))}
        assert {form for form, _ in enumerate_graphs(n, edges=2).forms()} == expected

    def test_ascending_forms(self):
        """Test that classes come out in ascending canonical-form order."""
        pairs = list(enumerate_graphs(6).forms())
        assert [form for form, _ in pairs] == sorted(form for form, _ in pairs)
        assert all(graph6_encode(g) == form.data for form, g in pairs)

    def test_level_cache_is_bounded(self):
        """Test that levels for many edge filters do not accumulate."""
        for m in range(10):
            enumerate_graphs(6, edges=(None, m)).count()
        info = _level.cache_info()
        assert info.maxsize == LEVEL_CACHE_SIZE
        assert info.currsize <= LEVEL_CACHE_SIZE

    def test_invalid_requests(self):
        """Test unsupported orders and bounds."""
        with pytest.raises(GraphStreamError):
            enumerate_graphs(0)
        with pytest.raises(GraphStreamError, match="long_run"):
            enumerate_graphs(10)
        with pytest.raises(GraphStreamError):
            enumerate_graphs(5, edges=(4, 2))


class TestGraph6Streams:
    """Test cases for reading and writing graph6 files."""

    @pytest.fixture
    def temp_path(self):
        """Create a temporary file path and remove it afterwards."""
        with tempfile.NamedTemporaryFile(suffix=".g6", delete=False) as tmp_file:
            path = tmp_file.name
        yield path
        try:
            os.unlink(path)
        except OSError:
            pass

    def write_lines(self, path, lines):
        with open(path, "wb") as handle:
            handle.write(b"".join(line + b"\n" for line in lines))

    def test_write_then_read(self, temp_path):
        """Test that written streams read back in order."""
        written = write_graph6_stream(enumerate_graphs(5), temp_path)
        assert written == 34
        stream = read_graph6_stream(temp_path)
        assert stream.order == 5
        assert not stream.canonical
        assert [graph6_encode(g) for g in stream] == [graph6_encode(g) for g in enumerate_graphs(5)]
        assert stream.count() == 34

    def test_header_and_blank_lines(self, temp_path):
        """Test that a header and blank lines are skipped."""
        self.write_lines(temp_path, [b">>graph6<<C~", b"", b"C?", b"   "])
        stream = read_graph6_stream(temp_path)
        assert stream.count() == 2

    def test_edge_filter(self, temp_path):
        """Test edge filtering on a file stream."""
        write_graph6_stream(enumerate_graphs(4), temp_path)
        assert read_graph6_stream(temp_path, edges=3).count() == 3

    def test_mixed_orders(self, temp_path):
        """Test that a record of another order fails with its line number."""
        self.write_lines(temp_path, [b"C~", b"C?", graph6_encode(complete(5))])
        stream = read_graph6_stream(temp_path)
        with pytest.raises(GraphStreamError) as info:
            list(stream)
        assert info.value.line == 3

    def test_malformed_line(self, temp_path):
        """Test that a malformed record fails with its line number."""
        self.write_lines(temp_path, [b"C~", b"C"])
        with pytest.raises(GraphStreamError) as info:
            list(read_graph6_stream(temp_path))
        assert info.value.line == 2
        assert isinstance(info.value.__cause__, Graph6Error)

    def test_padding_error_line(self, temp_path):
        """Test that nonzero padding bits fail with their line number."""
        self.write_lines(temp_path, [b"Bw", b"Bw", b"Bx"])
        with pytest.raises(GraphStreamError, match="line 3") as info:
            list(read_graph6_stream(temp_path))
        assert info.value.line == 3

    def test_empty_file(self, temp_path):
        """Test that a file without records is rejected."""
        self.write_lines(temp_path, [])
        with pytest.raises(GraphStreamError):
            read_graph6_stream(temp_path)

    def test_missing_file(self):
        """Test that I/O failures become GraphStreamError."""
        with pytest.raises(GraphStreamError):
            read_graph6_stream(os.path.join(tempfile.gettempdir(), "missing-dir", "none.g6"))

    def test_write_failure(self):
        """Test that unwritable paths become GraphStreamError."""
        with pytest.raises(GraphStreamError):
            write_graph6_stream(enumerate_graphs(3), os.path.join(tempfile.gettempdir(), "missing-dir", "out.g6"))
