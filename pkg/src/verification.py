"""
Theorem Verification Module

Exhaustive checks of the cospectrality results and the spectral facts they
rest on, over every isomorphism class of each order up to a bound. Each check
either confirms its statement for all orders or returns the first
counterexample (lowest order first) as a graph6 witness.

"If and only if" statements are checked by building the claimed family
members, canonicalizing them, and comparing the sets of canonical forms with
the classes that satisfy the spectral condition.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np
from sympy.utilities.iterables import partitions

from .cospectrality import (
    CS_MAX_LONG_RUN_ORDER,
    CS_MAX_ORDER,
    cs_closed_form,
    cs_max,
    kmn_positive,
    parallel_map,
    spectrum_table,
    table_cospectrality,
)
from .distance import Norm, distance_rows, sigma_to_complete
from .enumeration import LONG_RUN_ORDER, MAX_INTERNAL_ORDER
from .graph_core import (
    CanonicalForm,
    Graph,
    add_isolated,
    canonical_form,
    complete,
    complete_bipartite,
    complete_multipartite,
    delete_edge,
    disjoint_union,
    empty,
    graph6_encode,
    induced_subgraph,
    is_complete_bipartite_plus_isolated,
    is_complete_multipartite_plus_isolated,
    join,
    join_power,
)
from .spectrum import (
    ONE_THIRD,
    SQRT2_MINUS_1,
    X,
    Spectrum,
    abs_err_bound,
    char_poly,
    closed_form_spectrum,
    compare_eigenvalue,
    eigenvalues,
    eigenvalues_batch,
    energy,
)

logger = logging.getLogger(__name__)

DISTANCE_TOLERANCE = 1e-8
ENERGY_EQUALITY_TOLERANCE = 1e-6
SPECTRUM_TOLERANCE = 1e-9
INTERLACING_FULL_ORDER = 6
INTERLACING_SAMPLES = 16
INTERLACING_SEED = 20240
SUBGRAPH_CHUNK = 4096

CONFIRMED = "confirmed"
COUNTEREXAMPLE = "counterexample"


class VerificationError(ValueError):
    """Raised for an unknown check id or an unsupported order range."""


@dataclass(frozen=True)
class VerificationReport:
    """
    Result of one verification run.

    Attributes:
        theorem (str): Check id
        max_order (int): Requested upper order
        orders (Tuple[int, ...]): Orders examined, ascending
        status (str): ``confirmed`` or ``counterexample``
        graphs_checked (int): Graphs examined over all orders
        witness (Optional[str]): graph6 of the counterexample
        details (str): Human-readable summary
    """

    theorem: str
    max_order: int
    orders: Tuple[int, ...]
    status: str
    graphs_checked: int
    witness: Optional[str] = None
    details: str = ""

    def __post_init__(self):
        if self.status not in (CONFIRMED, COUNTEREXAMPLE):
            raise VerificationError(f"unknown status {self.status!r}")
        if self.status == COUNTEREXAMPLE and not self.witness:
            raise VerificationError("a counterexample report needs a witness")

    @property
    def confirmed(self) -> bool:
        return self.status == CONFIRMED


@dataclass(frozen=True)
class _Outcome:
    checked: int
    witness: Optional[Graph] = None
    details: str = ""


@dataclass(frozen=True)
class Verifier:
    """A registered check: id, descriptive name, smallest order and per-order check."""

    id: str
    name: str
    description: str
    min_order: int
    check: Callable[[int, bool], _Outcome]
    cs_max_bound: bool = False

    def max_supported(self, long_run: bool) -> int:
        if self.cs_max_bound:
            return CS_MAX_LONG_RUN_ORDER if long_run else CS_MAX_ORDER
        return LONG_RUN_ORDER if long_run else MAX_INTERNAL_ORDER


VERIFIERS: Dict[str, Verifier] = {}
ALIASES: Dict[str, str] = {}


def _register(id: str, name: str, description: str, min_order: int, cs_max_bound: bool = False):
    def decorator(check: Callable[[int, bool], _Outcome]) -> Callable[[int, bool], _Outcome]:
        VERIFIERS[id] = Verifier(id, name, description, min_order, check, cs_max_bound)
        ALIASES[name] = id
        return check

    return decorator


# helpers

def _forms(graphs: Iterable[Graph]) -> Set[CanonicalForm]:
    return {canonical_form(g) for g in graphs}


def _partitions(n: int, min_parts: int = 1, max_parts: Optional[int] = None) -> Iterator[List[int]]:
    for p in partitions(n, m=max_parts):
        parts = [size for size, count in sorted(p.items()) for _ in range(count)]
        if len(parts) >= min_parts:
            yield parts


def _table_graphs(n: int, long_run: bool) -> Iterator[Tuple[CanonicalForm, Graph, Spectrum]]:
    table = spectrum_table(n, long_run)
    bound = abs_err_bound(n)
    for form, g, row in zip(table.forms, table.graphs, table.values):
        yield form, g, Spectrum(tuple(float(v) for v in row), bound)


def _set_mismatch(found: Set[CanonicalForm], expected: Set[CanonicalForm], checked: int, what: str) -> _Outcome:
    extra = sorted(found - expected)
    missing = sorted(expected - found)
    if extra:
        return _Outcome(checked, extra[0].graph(), f"{extra[0]} satisfies {what} but is not a listed graph")
    if missing:
        return _Outcome(checked, missing[0].graph(), f"listed graph {missing[0]} does not satisfy {what}")
    return _Outcome(checked, details=f"{len(found)} classes satisfy {what}")


def _lambda2_in_window(g: Graph, spectrum: Spectrum) -> bool:
    return compare_eigenvalue(g, 2, 0, spectrum) > 0 and compare_eigenvalue(g, 2, SQRT2_MINUS_1, spectrum) <= 0


def window_shapes(n: int) -> Set[CanonicalForm]:
    """
    Canonical forms of the order-``n`` members of the three λ₂ ≤ √2-1 shapes.

    The shapes are (∇_t(K_1+K_2))∇K_{n_1,...,n_m} with t >= 1, m >= 0;
    (K_1+K_{r,s})∇(qK_1); and (K_1+K_{r,s})∇K_{p,q}, all parameters positive.
    """
    shapes: List[Graph] = []
    k1_k2 = disjoint_union(complete(1), complete(2))
    for t in range(1, n // 3 + 1):
        base = join_power(k1_k2, t)
        rest = n - 3 * t
        if rest == 0:
            shapes.append(base)
            continue
        for parts in _partitions(rest):
            shapes.append(join(base, complete_multipartite(parts)))
    for r in range(1, n):
        for s in range(r, n):
            rest = n - 1 - r - s
            if rest < 1:
                break
            head = disjoint_union(complete(1), complete_bipartite(r, s))
            shapes.append(join(head, empty(rest)))
            for p in range(1, rest // 2 + 1):
                shapes.append(join(head, complete_bipartite(p, rest - p)))
    return _forms(shapes)


# closed-form cospectrality

def _family_param(family: str, n: int) -> Optional[int]:
    if family in ("empty", "single_edge", "complete"):
        return n if n >= 2 else None
    if family == "balanced_bipartite":
        return n // 2 if n % 2 == 0 and n >= 4 else None
    return (n - 1) // 2 if n % 2 == 1 and n >= 5 else None


def _closed_form_check(family: str) -> Callable[[int, bool], _Outcome]:
    def check(n: int, long_run: bool) -> _Outcome:
        param = _family_param(family, n)
        if param is None:
            return _Outcome(0, details=f"no instance of order {n}")
        closed = cs_closed_form(family, param, Norm.L1)
        table = spectrum_table(n, long_run)
        result = table_cospectrality(table, table.index(canonical_form(closed.graph)), Norm.L1)
        expected = closed.minimizer_forms()
        if abs(result.value - closed.value) > DISTANCE_TOLERANCE or result.minimizers != expected:
            return _Outcome(len(table), closed.graph,
                            f"{closed.label}: brute force {result.value:.12g} with minimizers "
                            f"{[str(f) for f in result.minimizers]}, closed form {closed.value:.12g} "
                            f"with {[str(f) for f in expected]}")
        return _Outcome(len(table), details=f"{closed.label}: cs = {closed.expression}")

    return check


for _family, _name, _id, _min_order, _text in (
    ("empty", "null-graph", "thm_1_1", 2, "cs(nK_1) = 2, attained only by K_2 + (n-2)K_1"),
    ("single_edge", "single-edge", "thm_1_2", 2, "cs(K_2 + (n-2)K_1) = 2(√2-1) for n >= 3, attained only by P_3 + (n-3)K_1"),
    ("complete", "complete", "thm_1_3", 2, "cs(K_n) = 2, attained only by K_{n-1} + K_1 and K_n minus an edge"),
    ("balanced_bipartite", "balanced-bipartite", "thm_1_4", 4,
     "cs(K_{n,n}) = 2(n - √(n²-1)), attained only by K_{n-1,n+1}"),
    ("near_bipartite", "near-balanced-bipartite", "thm_1_5", 5,
     "cs(K_{n,n+1}) = 2(√(n²+n) - √(n²+n-2)), attained by K_{n-1,n+2} and its cospectral mates"),
):
    _register(_id, _name, _text, _min_order)(_closed_form_check(_family))


# spectral facts

@_register("thm_2_1", "energy-bound", "E(G) >= 2√m, with equality iff G is K_{r,s} + tK_1", 1)
def _energy_bound(n: int, long_run: bool) -> _Outcome:
    checked = 0
    for form, g, spectrum in _table_graphs(n, long_run):
        checked += 1
        m = g.m
        e = energy(g, spectrum)
        bound = 2 * math.sqrt(m)
        if e < bound - DISTANCE_TOLERANCE:
            return _Outcome(checked, g, f"energy {e:.12g} below 2√m = {bound:.12g}")
        if m == 0:
            continue
        near = abs(e - bound) <= ENERGY_EQUALITY_TOLERANCE
        structural = is_complete_bipartite_plus_isolated(g)
        if not (near or structural):
            continue
        coeffs = [0] * (n + 1)
        coeffs[n] = 1
        coeffs[n - 2] = -m
        exact = char_poly(g).coeffs == tuple(coeffs)
        if not near == exact == structural:
            return _Outcome(checked, g, f"equality mismatch: numeric {near}, exact {exact}, structural {structural}")
    return _Outcome(checked)


@_register("thm_3_1", "distance-to-complete", "σ(K_n, G) = 2(n* - 1 + λ_2 + ... + λ_{n*})", 1)
def _distance_to_complete(n: int, long_run: bool) -> _Outcome:
    table = spectrum_table(n, long_run)
    direct = distance_rows(table.values[table.index(canonical_form(complete(n)))], table.values, Norm.L1)
    checked = 0
    for (form, g, spectrum), expected in zip(_table_graphs(n, long_run), direct):
        checked += 1
        value = sigma_to_complete(n, g, spectrum)
        if abs(value - expected) > DISTANCE_TOLERANCE:
            return _Outcome(checked, g, f"closed form {value:.12g}, direct {expected:.12g}")
    return _Outcome(checked)


@_register("lemma_3_2", "complete-minus-edge-spectrum",
           "Spec(K_n minus an edge) = {(n-3±√(n²+2n-7))/2, 0, -1 (n-3 times)}", 2)
def _complete_minus_edge(n: int, long_run: bool) -> _Outcome:
    g = delete_edge(complete(n), 0, 1)
    closed = closed_form_spectrum("complete_minus_edge", n)
    numeric = eigenvalues(g)
    gap = max(abs(a - b) for a, b in zip(closed.values, numeric.values))
    if gap > SPECTRUM_TOLERANCE:
        return _Outcome(1, g, f"numeric spectrum differs from the closed form by {gap:.3e}")
    if n >= 3:
        expected = (X * (X + 1) ** (n - 3) * (X**2 - (n - 3) * X - 2 * (n - 2))).expand()
        if char_poly(g).to_poly().as_expr().expand() != expected:
            return _Outcome(1, g, f"characteristic polynomial {char_poly(g)} differs from {expected}")
    return _Outcome(1)


@_register("lemma_3_3", "sign-pattern",
           "λ_1 > 0, λ_2 <= 0, λ_3 < 0 iff G is K_n, K_1 + K_{n-1} or K_n minus an edge", 3)
def _sign_pattern(n: int, long_run: bool) -> _Outcome:
    found = set()
    checked = 0
    for form, g, spectrum in _table_graphs(n, long_run):
        checked += 1
        if (compare_eigenvalue(g, 1, 0, spectrum) > 0 and compare_eigenvalue(g, 2, 0, spectrum) <= 0
                and compare_eigenvalue(g, 3, 0, spectrum) < 0):
            found.add(form)
    expected = _forms([complete(n), add_isolated(complete(n - 1), 1), delete_edge(complete(n), 0, 1)])
    return _set_mismatch(found, expected, checked, "the sign pattern")


def _subsets(n: int, rng: np.random.Generator) -> Iterator[Tuple[int, ...]]:
    if n <= INTERLACING_FULL_ORDER:
        for size in range(1, n):
            yield from combinations(range(n), size)
        return
    for _ in range(INTERLACING_SAMPLES):
        size = int(rng.integers(1, n))
        yield tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))


@_register("thm_4_1", "interlacing", "λ_i(G) >= λ_i(H) >= λ_{n-m+i}(G) for induced subgraphs H", 2)
def _interlacing(n: int, long_run: bool) -> _Outcome:
    table = spectrum_table(n, long_run)
    rng = np.random.default_rng(INTERLACING_SEED + n)
    tolerance = 2 * abs_err_bound(n)
    by_size: Dict[int, List[Tuple[int, Graph]]] = defaultdict(list)
    for index, g in enumerate(table.graphs):
        for subset in _subsets(n, rng):
            by_size[len(subset)].append((index, induced_subgraph(g, subset)))
    subgraphs = 0
    for size in sorted(by_size):
        entries = by_size[size]
        for start in range(0, len(entries), SUBGRAPH_CHUNK):
            chunk = entries[start:start + SUBGRAPH_CHUNK]
            sub = eigenvalues_batch([h for _, h in chunk])
            host = table.values[[index for index, _ in chunk]]
            ok = (host[:, :size] >= sub - tolerance) & (sub >= host[:, n - size:] - tolerance)
            bad = ~ok.all(axis=1)
            if bad.any():
                k = int(np.argmax(bad))
                witness = table.graphs[chunk[k][0]]
                return _Outcome(len(table), witness,
                                f"induced subgraph {graph6_encode(chunk[k][1]).decode('ascii')} breaks interlacing")
            subgraphs += len(chunk)
    return _Outcome(len(table), details=f"{subgraphs} induced subgraphs")


@_register("thm_4_2", "second-eigenvalue",
           "without isolated vertices: λ_2 = -1 iff complete, λ_2 = 0 iff complete k-partite with 2 <= k <= n-1, "
           "and never -1 < λ_2 < 0", 2)
def _second_eigenvalue(n: int, long_run: bool) -> _Outcome:
    minus_one, zero = set(), set()
    checked = 0
    for form, g, spectrum in _table_graphs(n, long_run):
        if g.isolated_vertices():
            continue
        checked += 1
        above_minus_one = compare_eigenvalue(g, 2, -1, spectrum)
        at_zero = compare_eigenvalue(g, 2, 0, spectrum)
        if above_minus_one < 0:
            return _Outcome(checked, g, "λ_2 < -1")
        if above_minus_one > 0 and at_zero < 0:
            return _Outcome(checked, g, "λ_2 strictly between -1 and 0")
        if above_minus_one == 0:
            minus_one.add(form)
        if at_zero == 0:
            zero.add(form)
    outcome = _set_mismatch(minus_one, _forms([complete(n)]), checked, "λ_2 = -1")
    if outcome.witness is not None:
        return outcome
    multipartite = _forms(complete_multipartite(parts) for parts in _partitions(n, 2, n - 1))
    return _set_mismatch(zero, multipartite, checked, "λ_2 = 0")


@_register("thm_4_3", "one-positive-eigenvalue",
           "exactly one positive eigenvalue iff the non-isolated vertices form a complete multipartite graph", 2)
def _one_positive_eigenvalue(n: int, long_run: bool) -> _Outcome:
    found = set()
    checked = 0
    for form, g, spectrum in _table_graphs(n, long_run):
        if g.m == 0:
            continue
        checked += 1
        one_positive = compare_eigenvalue(g, 1, 0, spectrum) > 0 and compare_eigenvalue(g, 2, 0, spectrum) <= 0
        recognized = is_complete_multipartite_plus_isolated(g) is not None
        if one_positive != recognized:
            return _Outcome(checked, g, f"one positive eigenvalue: {one_positive}, multipartite plus isolated: {recognized}")
        if one_positive:
            found.add(form)
    expected = _forms(add_isolated(complete_multipartite(parts), t)
                      for t in range(n - 1) for parts in _partitions(n - t, 2))
    return _set_mismatch(found, expected, checked, "exactly one positive eigenvalue")


@_register("thm_4_4", "second-eigenvalue-below-third",
           "without isolated vertices: 0 < λ_2 < 1/3 iff G is (K_1+K_2)∇(n-3)K_1", 4)
def _second_eigenvalue_below_third(n: int, long_run: bool) -> _Outcome:
    found = set()
    checked = 0
    for form, g, spectrum in _table_graphs(n, long_run):
        if g.isolated_vertices():
            continue
        checked += 1
        if compare_eigenvalue(g, 2, 0, spectrum) > 0 and compare_eigenvalue(g, 2, ONE_THIRD, spectrum) < 0:
            found.add(form)
    expected = _forms([join(disjoint_union(complete(1), complete(2)), empty(n - 3))])
    return _set_mismatch(found, expected, checked, "0 < λ_2 < 1/3")


@_register("thm_4_5", "second-eigenvalue-window",
           "without isolated vertices: 0 < λ_2 <= √2-1 only for the three listed shapes", 4)
def _second_eigenvalue_window(n: int, long_run: bool) -> _Outcome:
    shapes = window_shapes(n)
    checked = 0
    inside = set()
    boundary = 0
    for form, g, spectrum in _table_graphs(n, long_run):
        if g.isolated_vertices():
            continue
        checked += 1
        if not _lambda2_in_window(g, spectrum):
            continue
        if form not in shapes:
            return _Outcome(checked, g, f"0 < λ_2 <= √2-1 but {form} is none of the listed shapes")
        inside.add(form)
        boundary += compare_eigenvalue(g, 2, SQRT2_MINUS_1, spectrum) == 0
    outside = len(shapes) - len(inside & shapes)
    return _Outcome(checked, details=f"{len(inside)} classes in the window ({boundary} on its boundary), "
                                     f"{outside} shape members outside it")


@_register("prop_4_6", "bipartite-positivity",
           "cs(K_{m,n}) > 0 iff m + n is the least x + y with xy = mn", 2)
def _bipartite_positivity(n: int, long_run: bool) -> _Outcome:
    table = spectrum_table(n, long_run)
    checked = 0
    for m in range(1, n // 2 + 1):
        g = complete_bipartite(m, n - m)
        checked += 1
        result = table_cospectrality(table, table.index(canonical_form(g)), Norm.L1)
        positive = result.value > DISTANCE_TOLERANCE
        if positive != kmn_positive(m, n - m):
            return _Outcome(checked, g, f"cs(K_{{{m},{n - m}}}) = {result.value:.12g}, criterion {not positive}")
    return _Outcome(checked)


@_register("lemma_4_7", "bipartite-distance-bound",
           "σ(G, K_{m,n}) >= 1 when λ_2(G) <= √2-1 and G is not K_{r,s} + tK_1 (m, n >= 2)", 4)
def _bipartite_distance_bound(n: int, long_run: bool) -> _Outcome:
    table = spectrum_table(n, long_run)
    targets = [(m, table.values[table.index(canonical_form(complete_bipartite(m, n - m)))])
               for m in range(2, n // 2 + 1)]
    checked = 0
    for (form, g, spectrum), row in zip(_table_graphs(n, long_run), table.values):
        if is_complete_bipartite_plus_isolated(g) or compare_eigenvalue(g, 2, SQRT2_MINUS_1, spectrum) > 0:
            continue
        checked += 1
        for m, target in targets:
            d = float(np.abs(row - target).sum())
            if d < 1 - DISTANCE_TOLERANCE:
                return _Outcome(checked, g, f"σ(G, K_{{{m},{n - m}}}) = {d:.12g}")
    return _Outcome(checked)


@_register("cs_max", "cs-max-lower-bound", "cs_n >= cs(K_n) = 2", 2, cs_max_bound=True)
def _cs_max_lower_bound(n: int, long_run: bool) -> _Outcome:
    result = cs_max(n, Norm.L1, long_run=long_run)
    if result.value < 2 - DISTANCE_TOLERANCE:
        return _Outcome(len(result.argmax), complete(n), f"cs_{n} = {result.value:.12g}")
    return _Outcome(len(spectrum_table(n)), details=f"cs_{n} = {result.value:.12g}")


# entry point

def resolve_theorem(theorem: str) -> Verifier:
    """
    Look up a check by id or descriptive name.

    Raises:
        VerificationError: For an unknown id
    """
    key = theorem.strip().lower()
    key = ALIASES.get(key, key)
    if key not in VERIFIERS:
        logger.error(f"Unknown theorem id {theorem!r}")
        raise VerificationError(f"unknown theorem id {theorem!r}; known ids: {', '.join(sorted(VERIFIERS))}")
    return VERIFIERS[key]


def verify(theorem: str, max_order: int, jobs: int = 1, long_run: bool = False) -> VerificationReport:
    """
    Run one check over every order from its smallest order up to ``max_order``.

    Orders may run on ``jobs`` threads; the reported counterexample is always
    the one of lowest order.

    Args:
        theorem (str): Check id (e.g. ``thm_2_1``) or descriptive name
        max_order (int): Largest order, within the enumeration range
        jobs (int): Worker threads over orders
        long_run (bool): Raise the order ceiling by one

    Returns:
        VerificationReport: ``confirmed`` or the first counterexample

    Raises:
        VerificationError: For an unknown id or an unsupported order range
    """
    verifier = resolve_theorem(theorem)
    ceiling = verifier.max_supported(long_run)
    if not verifier.min_order <= max_order <= ceiling:
        logger.error(f"verify({verifier.id}) with max order {max_order}")
        raise VerificationError(f"{verifier.id} supports max orders {verifier.min_order}..{ceiling}, got {max_order}")
    orders = tuple(range(verifier.min_order, max_order + 1))
    checked = 0
    details = []
    done: List[int] = []
    for n, outcome in zip(orders, parallel_map(lambda k: verifier.check(k, long_run), orders, jobs)):
        done.append(n)
        checked += outcome.checked
        if outcome.witness is not None:
            logger.info(f"{verifier.id}: counterexample at order {n}")
            return VerificationReport(verifier.id, max_order, tuple(done), COUNTEREXAMPLE, checked,
                                      graph6_encode(outcome.witness).decode("ascii"), f"order {n}: {outcome.details}")
        if outcome.details:
            details.append(f"order {n}: {outcome.details}")
        logger.info(f"{verifier.id}: order {n} confirmed ({outcome.checked} graphs)")
    return VerificationReport(verifier.id, max_order, orders, CONFIRMED, checked, None, "; ".join(details))
