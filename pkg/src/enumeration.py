"""
Graph Enumeration Module

This module streams one representative per isomorphism class of simple graphs
of a given order. The internal generator grows graphs one vertex at a time
(every neighbourhood of the new vertex) and deduplicates each level by
canonical code. External graph6 files can be read and written as streams of
a single order.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, Optional, Tuple, Union

from .graph_core import (
    CanonicalForm,
    Graph,
    Graph6Error,
    canonical_form,
    canonical_graph,
    canonical_labeling,
    graph6_decode,
    graph6_encode,
)

logger = logging.getLogger(__name__)

MAX_INTERNAL_ORDER = 9
LONG_RUN_ORDER = 10
LEVEL_CACHE_SIZE = 16
GRAPH6_HEADER = b">>graph6<<"

EdgeFilter = Union[None, int, Tuple[Optional[int], Optional[int]]]


class GraphStreamError(ValueError):
    """Raised for unsupported enumeration requests and bad graph6 streams."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass
class GraphStream:
    """
    Re-iterable stream of graphs of one order.

    Attributes:
        order (int): Order of every graph in the stream
        edge_bounds (Optional[Tuple[int, int]]): Inclusive edge-count filter
        source (str): ``"internal"`` or the path of a graph6 file
        canonical (bool): True when every yielded graph is the canonical
            representative of its class
    """

    order: int
    edge_bounds: Optional[Tuple[int, int]]
    source: str
    _factory: Callable[[], Iterator[Graph]] = field(repr=False, compare=False)
    canonical: bool = False
    _forms: Optional[Callable[[], Iterator[Tuple[CanonicalForm, Graph]]]] = field(
        default=None, repr=False, compare=False)

    def __iter__(self) -> Iterator[Graph]:
        return self._factory()

    def forms(self) -> Iterator[Tuple[CanonicalForm, Graph]]:
        """Yield ``(canonical form, graph)`` pairs."""
        if self._forms is not None:
            yield from self._forms()
            return
        for g in self:
            yield (CanonicalForm(graph6_encode(g)) if self.canonical else canonical_form(g)), g

    def count(self) -> int:
        return sum(1 for _ in self)


def _edge_bounds(n: int, edges: EdgeFilter) -> Optional[Tuple[int, int]]:
    if edges is None:
        return None
    if isinstance(edges, int):
        lo = hi = edges
    else:
        lo, hi = edges
    top = n * (n - 1) // 2
    lo = 0 if lo is None else lo
    hi = top if hi is None else hi
    if lo < 0 or hi < lo:
        logger.error(f"Invalid edge bounds {edges} for order {n}")
        raise GraphStreamError(f"invalid edge bounds {lo}:{hi}")
    return lo, min(hi, top)


@lru_cache(maxsize=LEVEL_CACHE_SIZE)
def _level(n: int, max_edges: Optional[int]) -> Tuple[Tuple[CanonicalForm, Graph], ...]:
    """Every class of order ``n`` with at most ``max_edges`` edges as (form, representative), sorted."""
    if n == 1:
        g = Graph(1, (0,))
        return ((canonical_form(g), g),)
    k = n - 1
    children: Dict[int, Tuple[Graph, Tuple[int, ...]]] = {}
    for _, g in _level(k, max_edges):
        base = g.m
        for neighbourhood in range(1 << k):
            if max_edges is not None and base + neighbourhood.bit_count() > max_edges:
                continue
            rows = tuple(row | (neighbourhood >> v & 1) << k for v, row in enumerate(g.rows)) + (neighbourhood,)
            child = Graph._unchecked(n, rows)
            code, order = canonical_labeling(child)
            if code not in children:
                children[code] = (child, order)
    level = []
    # same order, so ascending codes give ascending graph6 bytes
    for code in sorted(children):
        child, order = children[code]
        representative = canonical_graph(child, order)
        level.append((CanonicalForm(graph6_encode(representative)), representative))
    logger.info(f"Enumerated {len(level)} classes of order {n}")
    return tuple(level)


def enumerate_graphs(n: int, edges: EdgeFilter = None, long_run: bool = False) -> GraphStream:
    """
    Stream one representative per isomorphism class of order ``n``.

    Graphs come out as canonical representatives in ascending canonical-form
    order, so repeated runs yield the same sequence.

    Args:
        n (int): Order, 1..9 (1..10 with ``long_run``)
        edges: Exact edge count, an inclusive ``(min, max)`` pair (either end
            may be None) or None for no filter
        long_run (bool): Permit order 10

    Returns:
        GraphStream: Canonical stream

    Raises:
        GraphStreamError: If ``n`` is out of range or the bounds are invalid
    """
    limit = LONG_RUN_ORDER if long_run else MAX_INTERNAL_ORDER
    if not 1 <= n <= limit:
        hint = "" if long_run or n != LONG_RUN_ORDER else " (order 10 needs long_run)"
        logger.error(f"Enumeration of order {n} requested, supported range is 1..{limit}")
        raise GraphStreamError(f"internal enumeration supports orders 1..{limit}, got {n}{hint}")
    bounds = _edge_bounds(n, edges)
    top = n * (n - 1) // 2
    max_edges = None if bounds is None or bounds[1] >= top else bounds[1]

    def generate_forms() -> Iterator[Tuple[CanonicalForm, Graph]]:
        for form, g in _level(n, max_edges):
            if bounds is None or bounds[0] <= g.m <= bounds[1]:
                yield form, g

    def generate() -> Iterator[Graph]:
        for _, g in generate_forms():
            yield g

    return GraphStream(n, bounds, "internal", generate, canonical=True, _forms=generate_forms)


def _records(path: str) -> Iterator[Tuple[int, bytes]]:
    try:
        with open(path, "rb") as handle:
            for number, raw in enumerate(handle, start=1):
                line = raw.strip()
                if number == 1 and line.startswith(GRAPH6_HEADER):
                    line = line[len(GRAPH6_HEADER):]
                if line:
                    yield number, line
    except OSError as e:
        logger.error(f"Error reading graph6 file {path}: {e}")
        raise GraphStreamError(f"cannot read graph6 file {path}: {e}") from e


def _decode(number: int, line: bytes) -> Graph:
    try:
        return graph6_decode(line)
    except Graph6Error as e:
        raise GraphStreamError(str(e), line=number) from e


def read_graph6_stream(path: str, edges: EdgeFilter = None) -> GraphStream:
    """
    Open a graph6 file as a lazy stream of one order.

    The order is taken from the first record; a ``>>graph6<<`` header and
    blank lines are skipped. Records are decoded on iteration.

    Raises:
        GraphStreamError: On I/O failure, an empty file, a malformed line or
            a record whose order differs from the first (with its line number)
    """
    records = _records(path)
    first = next(records, None)
    records.close()
    if first is None:
        logger.error(f"No graph6 records in {path}")
        raise GraphStreamError(f"no graphs in {path}")
    order = _decode(*first).n
    bounds = _edge_bounds(order, edges)

    def generate() -> Iterator[Graph]:
        for number, line in _records(path):
            g = _decode(number, line)
            if g.n != order:
                raise GraphStreamError(f"order {g.n} differs from the stream order {order}", line=number)
            if bounds is None or bounds[0] <= g.m <= bounds[1]:
                yield g

    return GraphStream(order, bounds, str(path), generate)


def write_graph6_stream(stream: Iterable[Graph], path: str) -> int:
    """
    Write graphs as graph6 lines (LF terminated).

    Returns:
        int: Number of graphs written

    Raises:
        GraphStreamError: On I/O failure
    """
    count = 0
    try:
        with open(path, "wb") as handle:
            for g in stream:
                handle.write(graph6_encode(g) + b"\n")
                count += 1
    except OSError as e:
        logger.error(f"Error writing graph6 file {path}: {e}")
        raise GraphStreamError(f"cannot write graph6 file {path}: {e}") from e
    logger.info(f"Wrote {count} graphs to {path}")
    return count
