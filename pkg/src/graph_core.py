"""
Simple Graph Module

This module provides an immutable simple-graph type stored as packed bit rows,
the constructors and combinators used throughout the toolkit (complete,
multipartite, path, cycle, union, join, complement, edge deletion), canonical
forms for isomorphism testing, and the graph6 interchange format through
networkx.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

MAX_ORDER = 64
LARGE_ORDER = 11
GRAPH6_MAX_ORDER = 62
GRAPH6_OFFSET = 63


class GraphError(ValueError):
    """Raised when a graph cannot be built or an operation is undefined on it."""


class Graph6Error(GraphError):
    """Raised for malformed graph6 data."""


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


class Graph:
    """
    Immutable simple graph on the vertices ``0..n-1``.

    Row ``i`` is an integer whose bit ``j`` is set iff ``{i, j}`` is an edge.
    Instances are hashable and compare equal iff they have the same labeled
    adjacency; use :func:`is_isomorphic` for equality up to relabeling.
    """

    __slots__ = ("_n", "_rows", "_hash")

    def __init__(self, n: int, rows: Sequence[int]):
        """
        Build a graph from adjacency bit rows.

        Args:
            n (int): Number of vertices, 0..64
            rows (Sequence[int]): One bit row per vertex

        Raises:
            GraphError: If the rows are not a symmetric loop-free adjacency
        """
        if not 0 <= n <= MAX_ORDER:
            raise GraphError(f"order {n} outside supported range 0..{MAX_ORDER}")
        rows = tuple(int(row) for row in rows)
        if len(rows) != n:
            raise GraphError(f"expected {n} adjacency rows, got {len(rows)}")
        full = (1 << n) - 1
        for i, row in enumerate(rows):
            if row < 0 or row & ~full:
                raise GraphError(f"row {i} references a vertex outside 0..{n - 1}")
            if row >> i & 1:
                raise GraphError(f"loop at vertex {i}")
            for j in _iter_bits(row):
                if not rows[j] >> i & 1:
                    raise GraphError(f"adjacency is not symmetric at ({i}, {j})")
        self._n = n
        self._rows = rows
        self._hash = None

    @classmethod
    def _unchecked(cls, n: int, rows: Tuple[int, ...]) -> "Graph":
        graph = object.__new__(cls)
        graph._n = n
        graph._rows = rows
        graph._hash = None
        return graph

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        """
        Build a graph on ``n`` vertices from an edge list.

        Raises:
            GraphError: On loops or vertices outside ``0..n-1``
        """
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) outside 0..{n - 1}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @property
    def n(self) -> int:
        """Number of vertices."""
        return self._n

    @property
    def rows(self) -> Tuple[int, ...]:
        """Adjacency bit rows."""
        return self._rows

    @property
    def m(self) -> int:
        """Number of edges."""
        return sum(row.bit_count() for row in self._rows) // 2

    @property
    def is_large(self) -> bool:
        """True above the order where exhaustive canonical search stays cheap."""
        return self._n >= LARGE_ORDER

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self._n and 0 <= v < self._n and bool(self._rows[u] >> v & 1)

    def neighbors(self, v: int) -> List[int]:
        return list(_iter_bits(self._rows[v]))

    def degrees(self) -> Tuple[int, ...]:
        return tuple(row.bit_count() for row in self._rows)

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Yield every edge once as ``(u, v)`` with ``u < v``."""
        for u, row in enumerate(self._rows):
            for v in _iter_bits(row >> (u + 1)):
                yield u, u + 1 + v

    def isolated_vertices(self) -> List[int]:
        return [v for v, row in enumerate(self._rows) if row == 0]

    def components(self) -> List[List[int]]:
        """Connected components, each sorted, ordered by smallest vertex."""
        remaining = (1 << self._n) - 1
        components = []
        while remaining:
            frontier = remaining & -remaining
            seen = frontier
            while frontier:
                reach = 0
                for v in _iter_bits(frontier):
                    reach |= self._rows[v]
                frontier = reach & ~seen
                seen |= frontier
            components.append(list(_iter_bits(seen)))
            remaining &= ~seen
        return components

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix as an ``int8`` array."""
        return adjacency_stack([self])[0].astype(np.int8)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, self._rows))
        return self._hash

    def __repr__(self) -> str:
        if self._n <= GRAPH6_MAX_ORDER:
            return f"Graph(n={self._n}, m={self.m}, graph6={graph6_encode(self).decode('ascii')!r})"
        return f"Graph(n={self._n}, m={self.m})"


def adjacency_stack(graphs: Sequence[Graph]) -> np.ndarray:
    """
    Stack the adjacency matrices of same-order graphs.

    Args:
        graphs (Sequence[Graph]): Graphs that all have the same order

    Returns:
        np.ndarray: ``float64`` array of shape ``(len(graphs), n, n)``

    Raises:
        GraphError: If the orders differ
    """
    if not graphs:
        return np.zeros((0, 0, 0), dtype=np.float64)
    n = graphs[0].n
    if any(g.n != n for g in graphs):
        raise GraphError("adjacency_stack needs graphs of a single order")
    rows = np.array([g.rows for g in graphs], dtype=np.uint64).reshape(len(graphs), n)
    shifts = np.arange(n, dtype=np.uint64)
    bits = (rows[:, :, None] >> shifts[None, None, :]) & np.uint64(1)
    return bits.astype(np.float64)


def _check_order(n: int) -> None:
    if n < 0:
        raise GraphError(f"order must be non-negative, got {n}")
    if n > MAX_ORDER:
        raise GraphError(f"order {n} exceeds the supported maximum {MAX_ORDER}")


def complete(n: int) -> Graph:
    """Complete graph K_n."""
    _check_order(n)
    full = (1 << n) - 1
    return Graph._unchecked(n, tuple(full ^ (1 << v) for v in range(n)))


def empty(n: int) -> Graph:
    """Null graph nK_1 (n vertices, no edges)."""
    _check_order(n)
    return Graph._unchecked(n, (0,) * n)


def complete_multipartite(parts: Sequence[int]) -> Graph:
    """
    Complete multipartite graph K_{n_1,...,n_k}.

    Vertices are numbered part by part in the given order.

    Raises:
        GraphError: On an empty part list or a part smaller than 1
    """
    parts = [int(p) for p in parts]
    if not parts:
        raise GraphError("complete_multipartite needs at least one part")
    if any(p < 1 for p in parts):
        raise GraphError(f"part sizes must be positive, got {parts}")
    n = sum(parts)
    _check_order(n)
    full = (1 << n) - 1
    rows = []
    start = 0
    for size in parts:
        block = ((1 << size) - 1) << start
        rows.extend([full ^ block] * size)
        start += size
    return Graph._unchecked(n, tuple(rows))


def complete_bipartite(p: int, q: int) -> Graph:
    """Complete bipartite graph K_{p,q}."""
    return complete_multipartite([p, q])


def path(n: int) -> Graph:
    """Path P_n on n >= 1 vertices."""
    if n < 1:
        raise GraphError(f"path needs at least 1 vertex, got {n}")
    _check_order(n)
    return Graph.from_edges(n, ((v, v + 1) for v in range(n - 1)))


def cycle(n: int) -> Graph:
    """Cycle C_n on n >= 3 vertices."""
    if n < 3:
        raise GraphError(f"cycle needs at least 3 vertices, got {n}")
    _check_order(n)
    return Graph.from_edges(n, ((v, (v + 1) % n) for v in range(n)))


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """Disjoint union G + H; the vertices of H follow those of G."""
    _check_order(g.n + h.n)
    shift = g.n
    return Graph._unchecked(g.n + h.n, g.rows + tuple(row << shift for row in h.rows))


def disjoint_copies(g: Graph, t: int) -> Graph:
    """t disjoint copies of G (tG); t = 0 gives the graph of order 0."""
    if t < 0:
        raise GraphError(f"copy count must be non-negative, got {t}")
    result = empty(0)
    for _ in range(t):
        result = disjoint_union(result, g)
    return result


def join(g: Graph, h: Graph) -> Graph:
    """Join G ∇ H: the disjoint union plus every edge between G and H."""
    _check_order(g.n + h.n)
    shift = g.n
    g_mask = (1 << g.n) - 1
    h_mask = ((1 << h.n) - 1) << shift
    rows = tuple(row | h_mask for row in g.rows) + tuple((row << shift) | g_mask for row in h.rows)
    return Graph._unchecked(g.n + h.n, rows)


def join_power(g: Graph, t: int) -> Graph:
    """Iterated join of t >= 1 copies of G."""
    if t < 1:
        raise GraphError(f"join power needs t >= 1, got {t}")
    result = g
    for _ in range(t - 1):
        result = join(result, g)
    return result


def complement(g: Graph) -> Graph:
    full = (1 << g.n) - 1
    return Graph._unchecked(g.n, tuple(full ^ row ^ (1 << v) for v, row in enumerate(g.rows)))


def delete_edge(g: Graph, u: int, v: int) -> Graph:
    """
    Remove the edge {u, v}.

    Raises:
        GraphError: If {u, v} is not an edge of G
    """
    if not g.has_edge(u, v):
        raise GraphError(f"({u}, {v}) is not an edge")
    rows = list(g.rows)
    rows[u] &= ~(1 << v)
    rows[v] &= ~(1 << u)
    return Graph._unchecked(g.n, tuple(rows))


def add_isolated(g: Graph, t: int) -> Graph:
    """G + tK_1."""
    if t < 0:
        raise GraphError(f"isolated vertex count must be non-negative, got {t}")
    return disjoint_union(g, empty(t))


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> Graph:
    """Subgraph induced on ``vertices``; vertex ``vertices[i]`` becomes ``i``."""
    index = {v: i for i, v in enumerate(vertices)}
    if len(index) != len(vertices) or any(not 0 <= v < g.n for v in vertices):
        raise GraphError(f"invalid vertex selection {list(vertices)} for order {g.n}")
    rows = []
    for v in vertices:
        row = 0
        for w in _iter_bits(g.rows[v]):
            if w in index:
                row |= 1 << index[w]
        rows.append(row)
    return Graph._unchecked(len(vertices), tuple(rows))


def relabel(g: Graph, permutation: Sequence[int]) -> Graph:
    """Relabel vertex ``v`` as ``permutation[v]``."""
    if sorted(permutation) != list(range(g.n)):
        raise GraphError(f"{list(permutation)} is not a permutation of 0..{g.n - 1}")
    rows = [0] * g.n
    for v, row in enumerate(g.rows):
        new_row = 0
        for w in _iter_bits(row):
            new_row |= 1 << permutation[w]
        rows[permutation[v]] = new_row
    return Graph._unchecked(g.n, tuple(rows))


# networkx and graph6

def to_networkx(g: Graph) -> nx.Graph:
    """The same labeled graph as a networkx graph on nodes ``0..n-1``."""
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def from_networkx(h: nx.Graph, nodelist: Optional[Sequence] = None) -> Graph:
    """
    Convert a networkx graph, numbering vertices in ``nodelist`` order.

    Raises:
        GraphError: On self-loops or more than 64 vertices
    """
    nodes = list(h.nodes) if nodelist is None else list(nodelist)
    index = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), ((index[u], index[v]) for u, v in h.edges()))


def graph6_encode(g: Graph) -> bytes:
    """
    Encode a graph in the short graph6 form (no header, no newline).

    Raises:
        Graph6Error: If the order exceeds 62
    """
    if g.n > GRAPH6_MAX_ORDER:
        raise Graph6Error(f"short graph6 form holds at most {GRAPH6_MAX_ORDER} vertices, got {g.n}")
    return nx.to_graph6_bytes(to_networkx(g), nodes=range(g.n), header=False).rstrip(b"\n")


def graph6_decode(data) -> Graph:
    """
    Decode a short-form graph6 string.

    Args:
        data (bytes | str): One graph6 record, surrounding whitespace ignored

    Returns:
        Graph: The decoded graph

    Raises:
        Graph6Error: On bytes outside 63..126, a wrong length or nonzero padding
    """
    if isinstance(data, str):
        try:
            data = data.encode("ascii")
        except UnicodeEncodeError as e:
            raise Graph6Error(f"graph6 data must be ASCII: {e}") from e
    data = bytes(data).strip()
    if not data:
        raise Graph6Error("empty graph6 record")
    for offset, byte in enumerate(data):
        if not GRAPH6_OFFSET <= byte <= 126:
            raise Graph6Error(f"byte {byte} at offset {offset} outside the graph6 range 63..126")
    n = data[0] - GRAPH6_OFFSET
    if n > GRAPH6_MAX_ORDER:
        raise Graph6Error("long graph6 size prefix is not supported")
    try:
        h = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError) as e:
        raise Graph6Error(f"malformed graph6 record {data!r}: {e}") from e
    # networkx ignores the unused low bits of the last byte
    pad = -(n * (n - 1) // 2) % 6
    if pad and (data[-1] - GRAPH6_OFFSET) & ((1 << pad) - 1):
        raise Graph6Error("nonzero padding bits")
    return from_networkx(h, nodelist=range(n))


# canonical forms

@dataclass(frozen=True, order=True)
class CanonicalForm:
    """graph6 bytes of the canonical relabeling; equal iff the graphs are isomorphic."""

    data: bytes

    @property
    def order(self) -> int:
        return self.data[0] - GRAPH6_OFFSET

    def graph(self) -> Graph:
        """The canonical representative of the isomorphism class."""
        return graph6_decode(self.data)

    def __str__(self) -> str:
        return self.data.decode("ascii")


def _refine(rows: Sequence[int], cells: List[List[int]]) -> List[List[int]]:
    # Split cells by neighbour counts into every cell until stable. Subcells are
    # ordered by signature, so the ordered partition is an isomorphism invariant.
    while True:
        masks = [_mask(cell) for cell in cells]
        refined = []
        split = False
        for cell in cells:
            if len(cell) == 1:
                refined.append(cell)
                continue
            groups: Dict[Tuple[int, ...], List[int]] = {}
            for v in cell:
                row = rows[v]
                groups.setdefault(tuple((row & m).bit_count() for m in masks), []).append(v)
            if len(groups) == 1:
                refined.append(cell)
            else:
                split = True
                refined.extend(groups[key] for key in sorted(groups))
        if not split:
            return refined
        cells = refined


def _twins(rows: Sequence[int], u: int, v: int) -> bool:
    return rows[u] & ~(1 << v) == rows[v] & ~(1 << u)


def _triangle_code(rows: Sequence[int], order: Sequence[int]) -> int:
    """Upper triangle of the relabeled adjacency, column by column, first bit most significant."""
    code = 0
    for j in range(1, len(order)):
        row = rows[order[j]]
        for i in range(j):
            code = (code << 1) | (row >> order[i] & 1)
    return code


def _search(rows: Sequence[int], cells: List[List[int]], best: List) -> None:
    for index, cell in enumerate(cells):
        if len(cell) > 1:
            break
    else:
        order = [c[0] for c in cells]
        code = _triangle_code(rows, order)
        if code > best[0]:
            best[0] = code
            best[1] = order
        return
    tried: List[int] = []
    for v in cell:
        # swapping twins is an automorphism fixing every individualized vertex
        if any(_twins(rows, v, w) for w in tried):
            continue
        tried.append(v)
        branch = cells[:index] + [[v], [w for w in cell if w != v]] + cells[index + 1:]
        _search(rows, _refine(rows, branch), best)


def canonical_labeling(g: Graph) -> Tuple[int, Tuple[int, ...]]:
    """
    Canonical code of ``g`` and the vertex order that attains it.

    Vertices are first split by degree and the partition is refined by
    neighbour counts; the search then individualizes vertices of the first
    non-singleton cell (one representative per twin class) and keeps the
    largest column-order upper-triangle bit string over all discrete leaves.
    Two graphs of the same order are isomorphic iff their codes are equal.

    Returns:
        Tuple[int, Tuple[int, ...]]: The code and ``order``, where vertex
            ``order[i]`` of ``g`` becomes vertex ``i`` of the representative

    Raises:
        Graph6Error: If the order exceeds the graph6 short form
    """
    n = g.n
    if n > GRAPH6_MAX_ORDER:
        raise Graph6Error(f"canonical forms are limited to order {GRAPH6_MAX_ORDER}, got {n}")
    if n <= 1:
        return 0, tuple(range(n))
    if g.is_large:
        logger.debug(f"canonical search on a large graph of order {n}")
    rows = g.rows
    by_degree: Dict[int, List[int]] = {}
    for v, row in enumerate(rows):
        by_degree.setdefault(row.bit_count(), []).append(v)
    cells = [by_degree[d] for d in sorted(by_degree)]
    best = [-1, None]
    _search(rows, _refine(rows, cells), best)
    return best[0], tuple(best[1])


def canonical_graph(g: Graph, order: Optional[Sequence[int]] = None) -> Graph:
    """The canonical representative of the class of ``g`` (``order`` from :func:`canonical_labeling`)."""
    if order is None:
        order = canonical_labeling(g)[1]
    permutation = [0] * g.n
    for i, v in enumerate(order):
        permutation[v] = i
    return relabel(g, permutation)


def canonical_form(g: Graph) -> CanonicalForm:
    """
    Canonical graph6 encoding of the isomorphism class of ``g``.

    Raises:
        Graph6Error: If the order exceeds the graph6 short form
    """
    return CanonicalForm(graph6_encode(canonical_graph(g)))


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.m != h.m or sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_labeling(g)[0] == canonical_labeling(h)[0]


# structural recognizers

class MultipartiteShape(NamedTuple):
    """Sorted part sizes of the non-isolated vertices and the isolated count."""

    parts: Tuple[int, ...]
    isolated: int


def is_complete_multipartite_plus_isolated(g: Graph) -> Optional[MultipartiteShape]:
    """
    Recognize K_{n_1,...,n_k} + tK_1.

    On the non-isolated vertices non-adjacency must be an equivalence relation;
    its classes are the parts. Edgeless graphs have no non-isolated vertices
    and are not recognized.

    Returns:
        Optional[MultipartiteShape]: Parts ascending plus t, or None
    """
    rows = g.rows
    active = _mask(v for v, row in enumerate(rows) if row)
    if not active:
        return None
    classes = {}
    for v in _iter_bits(active):
        cls = active & ~rows[v]
        if cls in classes:
            continue
        if any(active & ~rows[w] != cls for w in _iter_bits(cls)):
            return None
        classes[cls] = cls.bit_count()
    parts = tuple(sorted(classes.values()))
    return MultipartiteShape(parts, g.n - active.bit_count())


def is_complete_bipartite_plus_isolated(g: Graph) -> bool:
    """True iff G is K_{p,q} + tK_1 with at least one edge."""
    shape = is_complete_multipartite_plus_isolated(g)
    return shape is not None and len(shape.parts) == 2
