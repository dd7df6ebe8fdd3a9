"""
Cospectrality Module

This module computes the cospectrality cs(G), the smallest spectral distance
from G to a non-isomorphic graph of the same order, by brute force over every
isomorphism class, together with the full set of minimizing classes. It also
holds the closed forms for the null, single-edge, complete and near-balanced
complete bipartite families, the maximum cs_n over an order, the divisor
criterion for cs(K_{m,n}) > 0 and the brute-force versus closed-form table.
"""

import csv
import io
import json
import logging
import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice
from typing import Callable, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import sympy

from .distance import Norm, distance_rows
from .enumeration import GraphStream, enumerate_graphs
from .graph_core import (
    CanonicalForm,
    Graph,
    add_isolated,
    canonical_form,
    complete,
    complete_bipartite,
    delete_edge,
    empty,
    path,
)
from .spectrum import EXACT_ORDER_LIMIT, char_poly, eigenvalues, eigenvalues_batch, precise_eigenvalues

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-7
NEAR_TIE = 1e-10
NEAR_TIE_DIGITS = 30
TABLE_CACHE_SIZE = 4
DEFAULT_CHUNK_SIZE = 4096
CS_MAX_ORDER = 7
CS_MAX_LONG_RUN_ORDER = 8
TABLE_MIN_ORDER = 4
TABLE_MAX_ORDER = 9


class CospectralityError(ValueError):
    """Raised when cs is undefined or a request is outside the supported range."""


@dataclass(frozen=True)
class CsResult:
    """
    Outcome of a brute-force cospectrality search.

    Attributes:
        value (float): cs(G) under ``norm``
        minimizers (Tuple[CanonicalForm, ...]): Every class within the tie
            tolerance of the minimum, ascending
        graphs_scanned (int): Non-isomorphic candidates compared
        exact_zero (bool): A candidate has exactly the query's characteristic polynomial
        norm (Norm): Distance used
    """

    value: float
    minimizers: Tuple[CanonicalForm, ...]
    graphs_scanned: int
    exact_zero: bool
    norm: Norm = Norm.L1

    def __post_init__(self):
        if self.value < 0:
            raise CospectralityError(f"negative cospectrality {self.value}")
        if not self.minimizers:
            raise CospectralityError("a cospectrality result needs at least one minimizer")
        if self.exact_zero and self.value != 0.0:
            raise CospectralityError("exact_zero results must have value 0")


class _Partial(NamedTuple):
    best: float
    candidates: Tuple[Tuple[float, CanonicalForm], ...]
    scanned: int


def _partial(distances: np.ndarray, forms: Sequence[CanonicalForm]) -> _Partial:
    finite = np.isfinite(distances)
    scanned = int(finite.sum())
    if not scanned:
        return _Partial(math.inf, (), 0)
    best = float(distances[finite].min())
    picks = np.nonzero(distances <= best + TIE_TOLERANCE)[0]
    return _Partial(best, tuple((float(distances[i]), forms[i]) for i in picks), scanned)


def _merge(partials: Iterable[_Partial]) -> _Partial:
    """Associative and order-independent: keeps every candidate within the tie tolerance of the global minimum."""
    partials = list(partials)
    best = min((p.best for p in partials), default=math.inf)
    candidates = tuple(c for p in partials for c in p.candidates if c[0] <= best + TIE_TOLERANCE)
    return _Partial(best, candidates, sum(p.scanned for p in partials))


def parallel_map(fn: Callable, items: Iterable, jobs: int) -> Iterator:
    """Map in input order, on up to ``jobs`` threads, pulling at most ``2 * jobs`` items ahead."""
    if jobs <= 1:
        yield from map(fn, items)
        return
    items = iter(items)
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        while True:
            window = list(islice(items, 2 * jobs))
            if not window:
                return
            yield from executor.map(fn, window)


# spectra tables

@dataclass(frozen=True, eq=False)
class SpectrumTable:
    """Canonical forms of every class of one order with representatives and spectra (rows descending)."""

    order: int
    forms: Tuple[CanonicalForm, ...]
    graphs: Tuple[Graph, ...] = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.forms)

    def index(self, form: CanonicalForm) -> Optional[int]:
        position = bisect_left(self.forms, form)
        if position < len(self.forms) and self.forms[position] == form:
            return position
        return None


def spectrum_table(n: int, long_run: bool = False) -> SpectrumTable:
    """
    Spectra of all classes of order ``n``, computed once per process.

    Raises:
        GraphStreamError: If ``n`` is outside the enumeration range
    """
    enumerate_graphs(n, long_run=long_run)
    return _build_table(n)


@lru_cache(maxsize=TABLE_CACHE_SIZE)
def _build_table(n: int) -> SpectrumTable:
    # order gate already checked by the caller
    pairs = list(enumerate_graphs(n, long_run=True).forms())
    forms = tuple(form for form, _ in pairs)
    graphs = tuple(g for _, g in pairs)
    blocks = []
    for start in range(0, len(graphs), DEFAULT_CHUNK_SIZE):
        blocks.append(eigenvalues_batch(graphs[start:start + DEFAULT_CHUNK_SIZE]))
    values = np.concatenate(blocks) if blocks else np.zeros((0, n))
    logger.info(f"Spectrum table for order {n}: {len(forms)} classes")
    return SpectrumTable(n, forms, graphs, values)


# brute-force search

def _precise_distance(query: Tuple[sympy.Float, ...], other: Tuple[sympy.Float, ...], norm: Norm) -> sympy.Float:
    if norm is Norm.L1:
        return sum((abs(a - b) for a, b in zip(query, other)), sympy.Float(0, NEAR_TIE_DIGITS))
    return sum(((a - b) ** 2 for a, b in zip(query, other)), sympy.Float(0, NEAR_TIE_DIGITS))


def recheck_near_ties(g: Graph, candidates: Sequence[Tuple[float, CanonicalForm]],
                      norm: Norm) -> List[Tuple[CanonicalForm, CanonicalForm]]:
    """
    Re-check candidate pairs whose float distances differ by less than 1e-10.

    Cospectral pairs tie exactly. Other pairs are compared at 30 digits from
    the characteristic polynomial roots; pairs the digits separate are
    logged as warnings and returned. Both classes stay minimizers either way.

    Returns:
        List[Tuple[CanonicalForm, CanonicalForm]]: Near ties that are not exact
    """
    if g.n > EXACT_ORDER_LIMIT:
        return []
    ordered = sorted(candidates)
    separated = []
    query = None
    for (d1, f1), (d2, f2) in zip(ordered, ordered[1:]):
        if f1 == f2 or abs(d1 - d2) >= NEAR_TIE:
            continue
        p1, p2 = char_poly(f1.graph()), char_poly(f2.graph())
        if p1 == p2:
            logger.debug(f"Exact tie at {d1:.3e}: {f1} and {f2} are cospectral")
            continue
        if query is None:
            query = precise_eigenvalues(char_poly(g), NEAR_TIE_DIGITS)
        e1 = _precise_distance(query, precise_eigenvalues(p1, NEAR_TIE_DIGITS), norm)
        e2 = _precise_distance(query, precise_eigenvalues(p2, NEAR_TIE_DIGITS), norm)
        if abs(e1 - e2) > sympy.Float(10) ** (10 - NEAR_TIE_DIGITS):
            logger.warning(f"Near tie {d1:.12g} / {d2:.12g} between {f1} and {f2} is not exact "
                           f"({sympy.N(e1, 15)} vs {sympy.N(e2, 15)})")
            separated.append((f1, f2))
        else:
            logger.debug(f"Tie at {d1:.3e} between non-cospectral {f1} and {f2} holds to {NEAR_TIE_DIGITS} digits")
    return separated


def _finish(g: Graph, partial: _Partial, norm: Norm) -> CsResult:
    if not partial.scanned:
        logger.error(f"No non-isomorphic candidates for a graph of order {g.n}")
        raise CospectralityError(f"cs is undefined: no graph of order {g.n} is non-isomorphic to the query")
    candidates = sorted(set(partial.candidates), key=lambda c: (c[1], c[0]))
    forms = tuple(sorted({form for _, form in candidates}))
    if partial.best <= TIE_TOLERANCE:
        if g.n > EXACT_ORDER_LIMIT:
            logger.warning(f"order {g.n} above the exact limit, cs = 0 cannot be certified")
        else:
            target = char_poly(g)
            if any(char_poly(form.graph()) == target for form in forms):
                zero = tuple(sorted({form for d, form in candidates if d <= TIE_TOLERANCE}))
                return CsResult(0.0, zero, partial.scanned, True, norm)
            logger.debug(f"distance {partial.best:.3e} within the zero band but no cospectral mate")
    recheck_near_ties(g, candidates, norm)
    return CsResult(partial.best, forms, partial.scanned, False, norm)


def _scan_table(table: SpectrumTable, query: np.ndarray, skip: Optional[int], norm: Norm,
                jobs: int, chunk_size: int) -> _Partial:
    def scan(bounds: Tuple[int, int]) -> _Partial:
        start, stop = bounds
        distances = distance_rows(query, table.values[start:stop], norm)
        if skip is not None and start <= skip < stop:
            distances[skip - start] = np.inf
        return _partial(distances, table.forms[start:stop])

    ranges = [(start, min(start + chunk_size, len(table))) for start in range(0, len(table), chunk_size)]
    return _merge(parallel_map(scan, ranges, jobs))


def _stream_chunks(stream: GraphStream, chunk_size: int) -> Iterator[Tuple[List[CanonicalForm], List[Graph]]]:
    forms, graphs = [], []
    for form, h in stream.forms():
        forms.append(form)
        graphs.append(h)
        if len(forms) == chunk_size:
            yield forms, graphs
            forms, graphs = [], []
    if forms:
        yield forms, graphs


def _scan_stream(stream: GraphStream, query: np.ndarray, query_form: CanonicalForm, norm: Norm,
                 jobs: int, chunk_size: int) -> _Partial:
    def scan(chunk: Tuple[List[CanonicalForm], List[Graph]]) -> _Partial:
        forms, graphs = chunk
        distances = distance_rows(query, eigenvalues_batch(graphs), norm)
        distances[np.array([form == query_form for form in forms])] = np.inf
        return _partial(distances, forms)

    return _merge(parallel_map(scan, _stream_chunks(stream, chunk_size), jobs))


def cospectrality(g: Graph, norm="l1", stream: Optional[GraphStream] = None, jobs: int = 1,
                  chunk_size: int = DEFAULT_CHUNK_SIZE, long_run: bool = False) -> CsResult:
    """
    Brute-force cs(G) over every class of the same order.

    Candidates isomorphic to ``g`` are excluded. The minimizers are all
    classes within 1e-7 of the minimum. A minimum inside the zero band is
    reported as exactly 0 only when a candidate has the same characteristic
    polynomial as ``g``. The result does not depend on ``jobs`` or
    ``chunk_size``.

    Args:
        g (Graph): Query graph, order >= 2
        norm: ``"l1"`` or ``"l2sq"``
        stream (Optional[GraphStream]): Candidates; the internal enumeration when None
        jobs (int): Worker threads
        chunk_size (int): Graphs per solver batch
        long_run (bool): Permit internal enumeration of order 10

    Returns:
        CsResult: Value and minimizer set

    Raises:
        CospectralityError: For order 1 or a stream of another order
    """
    norm = Norm.parse(norm)
    if g.n < 2:
        logger.error(f"cs requested for a graph of order {g.n}")
        raise CospectralityError(f"cs is undefined for order {g.n}: no non-isomorphic graph exists")
    if stream is not None and stream.order != g.n:
        logger.error(f"Stream of order {stream.order} given for a graph of order {g.n}")
        raise CospectralityError(f"stream order {stream.order} does not match graph order {g.n}")
    chunk_size = max(1, int(chunk_size))
    query_form = canonical_form(g)
    query = eigenvalues(g).as_array()
    if stream is None:
        table = spectrum_table(g.n, long_run)
        partial = _scan_table(table, query, table.index(query_form), norm, jobs, chunk_size)
    else:
        partial = _scan_stream(stream, query, query_form, norm, jobs, chunk_size)
    return _finish(g, partial, norm)


def table_cospectrality(table: SpectrumTable, index: int, norm: Norm) -> CsResult:
    """cs of the class at ``index`` of a spectrum table, scanned against the rest of the table."""
    g = table.graphs[index]
    partial = _scan_table(table, table.values[index], index, norm, 1, max(1, len(table)))
    return _finish(g, partial, norm)


# closed forms

CLOSED_FORM_FAMILIES = ("empty", "single_edge", "complete", "balanced_bipartite", "near_bipartite")
_FAMILY_MIN_PARAM = {"empty": 2, "single_edge": 2, "complete": 2, "balanced_bipartite": 2, "near_bipartite": 2}


def _bipartite_mates(product: int, order: int) -> List[Graph]:
    """Every K_{r,s} + tK_1 of the given order with rs = ``product``; these share one spectrum."""
    mates = []
    for r in sympy.divisors(product):
        s = product // r
        if r <= s and r + s <= order:
            mates.append(add_isolated(complete_bipartite(r, s), order - r - s))
    return mates


@dataclass(frozen=True)
class ClosedForm:
    """
    Closed-form cospectrality of a family instance.

    Attributes:
        family (str): One of ``CLOSED_FORM_FAMILIES``
        n (int): Family parameter
        norm (Norm): Distance the value refers to
        expression (sympy.Expr): Exact value
        minimizers (Tuple[Graph, ...]): Every minimizing class, one graph each
    """

    family: str
    n: int
    norm: Norm
    expression: sympy.Expr
    minimizers: Tuple[Graph, ...]

    @property
    def value(self) -> float:
        return float(self.expression)

    @property
    def graph(self) -> Graph:
        return family_graph(self.family, self.n)

    @property
    def order(self) -> int:
        return self.graph.n

    @property
    def label(self) -> str:
        return family_label(self.family, self.n)

    def minimizer_forms(self) -> Tuple[CanonicalForm, ...]:
        return tuple(sorted({canonical_form(h) for h in self.minimizers}))


def _check_family(family: str, n: int) -> None:
    if family not in _FAMILY_MIN_PARAM:
        raise CospectralityError(f"unknown family {family!r}, expected one of {', '.join(CLOSED_FORM_FAMILIES)}")
    if n < _FAMILY_MIN_PARAM[family]:
        logger.error(f"Family {family} with parameter {n} is below its range")
        raise CospectralityError(f"family {family} needs n >= {_FAMILY_MIN_PARAM[family]}, got {n}")


def family_graph(family: str, n: int) -> Graph:
    """The family instance: nK_1, K_2+(n-2)K_1, K_n, K_{n,n} or K_{n,n+1}."""
    _check_family(family, n)
    if family == "empty":
        return empty(n)
    if family == "single_edge":
        return add_isolated(complete(2), n - 2)
    if family == "complete":
        return complete(n)
    if family == "balanced_bipartite":
        return complete_bipartite(n, n)
    return complete_bipartite(n, n + 1)


def family_label(family: str, n: int) -> str:
    """Family instance in expression syntax, e.g. ``K2+3*K1`` or ``K3,4``."""
    _check_family(family, n)
    if family == "empty":
        return f"E{n}"
    if family == "single_edge":
        return "K2" if n == 2 else "K2+K1" if n == 3 else f"K2+{n - 2}*K1"
    if family == "complete":
        return f"K{n}"
    if family == "balanced_bipartite":
        return f"K{n},{n}"
    return f"K{n},{n + 1}"


def cs_closed_form(family: str, n: int, norm="l1") -> ClosedForm:
    """
    Closed-form cs of a family instance with its complete minimizer set.

    Minimizer sets are closed under cospectral mates of the form
    K_{r,s} + tK_1, so K_{2,3} lists both K_{1,4} and C_4 + K_1.

    Args:
        family (str): ``empty`` (nK_1), ``single_edge`` (K_2+(n-2)K_1),
            ``complete`` (K_n), ``balanced_bipartite`` (K_{n,n}) or
            ``near_bipartite`` (K_{n,n+1})
        n (int): Family parameter, at least 2
        norm: ``"l1"`` or ``"l2sq"``

    Raises:
        CospectralityError: On an unknown family or a parameter below range
    """
    norm = Norm.parse(norm)
    _check_family(family, n)
    l1 = norm is Norm.L1
    if family == "empty":
        value = sympy.Integer(2)
        minimizers = [add_isolated(complete(2), n - 2)]
    elif family == "single_edge":
        if n == 2:
            value = sympy.Integer(2)
            minimizers = [empty(2)]
        else:
            gap = sympy.sqrt(2) - 1
            value = 2 * gap if l1 else 2 * gap**2
            minimizers = [add_isolated(path(3), n - 3)]
    elif family == "complete":
        if l1:
            value = sympy.Integer(2)
            minimizers = [add_isolated(complete(n - 1), 1), delete_edge(complete(n), 0, 1)]
        else:
            value = n**2 + n - n * sympy.sqrt(n**2 + 2 * n - 7) - 2
            minimizers = [delete_edge(complete(n), 0, 1)]
    elif family == "balanced_bipartite":
        gap = n - sympy.sqrt(n**2 - 1)
        value = 2 * gap if l1 else 2 * gap**2
        minimizers = _bipartite_mates(n * n - 1, 2 * n)
    else:
        gap = sympy.sqrt(n**2 + n) - sympy.sqrt(n**2 + n - 2)
        value = 2 * gap if l1 else 2 * gap**2
        minimizers = _bipartite_mates(n * n + n - 2, 2 * n + 1)
    unique = {canonical_form(h): h for h in minimizers}
    return ClosedForm(family, n, norm, value, tuple(unique[form] for form in sorted(unique)))


def kmn_positive(m: int, n: int) -> bool:
    """
    True iff m + n is the least x + y over positive x, y with xy = mn.

    Otherwise some K_{x,y} + tK_1 is cospectral with K_{m,n} and cs(K_{m,n}) = 0.

    Raises:
        CospectralityError: If m or n is below 1
    """
    if m < 1 or n < 1:
        raise CospectralityError(f"kmn_positive needs m, n >= 1, got {m}, {n}")
    product = m * n
    return m + n == min(d + product // d for d in sympy.divisors(product))


# cs_n

@dataclass(frozen=True)
class CsMaxResult:
    """cs_n with every class attaining it (within the tie tolerance), ascending."""

    order: int
    value: float
    argmax: Tuple[CanonicalForm, ...]
    norm: Norm


def cs_max(n: int, norm="l1", long_run: bool = False) -> CsMaxResult:
    """
    cs_n, the largest cs over all classes of order ``n``.

    Args:
        n (int): Order, 2..7 (8 with ``long_run``)
        norm: ``"l1"`` or ``"l2sq"``
        long_run (bool): Permit order 8

    Raises:
        CospectralityError: If ``n`` is out of range
    """
    norm = Norm.parse(norm)
    limit = CS_MAX_LONG_RUN_ORDER if long_run else CS_MAX_ORDER
    if not 2 <= n <= limit:
        logger.error(f"cs_max({n}) requested, supported range is 2..{limit}")
        raise CospectralityError(f"cs_max supports orders 2..{limit}, got {n}")
    table = spectrum_table(n)
    values = [table_cospectrality(table, i, norm).value for i in range(len(table))]
    best = max(values)
    argmax = tuple(form for form, value in zip(table.forms, values) if value >= best - TIE_TOLERANCE)
    logger.info(f"cs_{n} = {best:.12g} under {norm}, attained by {len(argmax)} classes")
    return CsMaxResult(n, best, argmax, norm)


# comparison table

TABLE_FIELDS = ("graph", "norm", "cs_bruteforce", "cs_closed_form", "minimizers")


@dataclass(frozen=True)
class TableRow:
    """One family instance under one norm: brute-force cs next to its closed form."""

    graph: str
    norm: str
    cs_bruteforce: float
    cs_closed_form: float
    minimizers: Tuple[str, ...]
    closed_form_expression: str = ""
    minimizers_match: bool = True

    @property
    def agrees(self) -> bool:
        return abs(self.cs_bruteforce - self.cs_closed_form) <= 1e-8 and self.minimizers_match


def _family_params(max_n: int) -> Iterator[Tuple[str, int]]:
    for family in CLOSED_FORM_FAMILIES:
        for n in range(2, max_n + 1):
            order = family_graph(family, n).n
            if TABLE_MIN_ORDER <= order <= max_n:
                yield family, n


def comparison_table(max_n: int, norms: Sequence = ("l1", "l2sq"), jobs: int = 1,
                     describe: Optional[Callable[[Graph], Optional[str]]] = None) -> List[TableRow]:
    """
    Brute-force cs against the closed forms for every family instance of order 4..``max_n``.

    Rows are ordered by family, then order, then norm; the output is the same
    for any ``jobs``.

    Args:
        max_n (int): Largest order, 4..9
        norms (Sequence): Norms to tabulate
        jobs (int): Worker threads for the scans
        describe: Optional labeler for minimizers; graph6 is used when it returns None

    Raises:
        CospectralityError: If ``max_n`` is outside 4..9
    """
    if not TABLE_MIN_ORDER <= max_n <= TABLE_MAX_ORDER:
        logger.error(f"comparison_table({max_n}) requested")
        raise CospectralityError(f"the comparison table covers orders {TABLE_MIN_ORDER}..{TABLE_MAX_ORDER}, got {max_n}")
    norms = [Norm.parse(norm) for norm in norms]
    rows = []
    for family, n in _family_params(max_n):
        g = family_graph(family, n)
        for norm in norms:
            closed = cs_closed_form(family, n, norm)
            result = cospectrality(g, norm, jobs=jobs)
            labels = []
            for form in result.minimizers:
                label = describe(form.graph()) if describe else None
                labels.append(label or str(form))
            rows.append(TableRow(
                graph=closed.label,
                norm=norm.value,
                cs_bruteforce=result.value,
                cs_closed_form=closed.value,
                minimizers=tuple(labels),
                closed_form_expression=str(closed.expression),
                minimizers_match=result.minimizers == closed.minimizer_forms(),
            ))
            if not rows[-1].agrees:
                logger.warning(f"{closed.label} under {norm}: brute force {result.value:.12g} "
                               f"vs closed form {closed.value:.12g}")
        logger.info(f"Table row {closed.label} done")
    return rows


def _cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, tuple):
        return ";".join(value)
    return str(value)


def rows_to_csv(rows: Sequence[TableRow]) -> str:
    """CSV with header ``graph,norm,cs_bruteforce,cs_closed_form,minimizers``; minimizers joined by ``;``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TABLE_FIELDS)
    for row in rows:
        writer.writerow([_cell(getattr(row, name)) for name in TABLE_FIELDS])
    return buffer.getvalue()


def rows_to_json(rows: Sequence[TableRow]) -> str:
    """JSON array of row objects with the CSV keys; numbers rounded to 12 significant digits."""
    payload = []
    for row in rows:
        payload.append({
            "graph": row.graph,
            "norm": row.norm,
            "cs_bruteforce": float(format(row.cs_bruteforce, ".12g")),
            "cs_closed_form": float(format(row.cs_closed_form, ".12g")),
            "minimizers": list(row.minimizers),
        })
    return json.dumps(payload, indent=2)
