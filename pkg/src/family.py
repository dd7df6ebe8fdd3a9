"""
Family Expression Module

This module parses compact graph-family expressions such as ``K2+3*K1``,
``(K1+K2)vE3``, ``K5-e`` or ``K3,4`` into a small syntax tree that evaluates
to a Graph and prints back to the same text, and labels graphs with such
expressions when their components are recognized.

Grammar::

    expr   := term { "+" term }
    term   := factor { "v" factor }
    factor := [ int "*" ] atom
    atom   := base [ "-e" ] | "(" expr ")"
    base   := "K" int { "," int } | "P" int | "C" int | "E" int

``+`` is disjoint union and ``v`` is join; both are left-associative and
``v`` binds tighter.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from .graph_core import (
    Graph,
    canonical_form,
    complete,
    complete_multipartite,
    cycle,
    delete_edge,
    disjoint_copies,
    disjoint_union,
    empty,
    induced_subgraph,
    is_complete_multipartite_plus_isolated,
    join,
    path,
)

logger = logging.getLogger(__name__)


class FamilyParseError(ValueError):
    """Raised for malformed family expressions; ``offset`` is the failing position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Atom:
    kind: str
    sizes: Tuple[int, ...]
    minus_edge: bool = False

    @property
    def order(self) -> int:
        return sum(self.sizes)

    def evaluate(self) -> Graph:
        n = self.sizes[0]
        if self.kind == "K":
            if len(self.sizes) > 1:
                return complete_multipartite(self.sizes)
            g = complete(n)
            return delete_edge(g, 0, 1) if self.minus_edge else g
        if self.kind == "P":
            return path(n)
        if self.kind == "C":
            return cycle(n)
        return empty(n)

    def __str__(self) -> str:
        return f"{self.kind}{','.join(str(s) for s in self.sizes)}{'-e' if self.minus_edge else ''}"


@dataclass(frozen=True)
class Group:
    inner: "FamilyExpr"

    @property
    def order(self) -> int:
        return self.inner.order

    def evaluate(self) -> Graph:
        return self.inner.evaluate()

    def __str__(self) -> str:
        return f"({self.inner})"


@dataclass(frozen=True)
class Copies:
    count: int
    inner: Union[Atom, Group]

    @property
    def order(self) -> int:
        return self.count * self.inner.order

    def evaluate(self) -> Graph:
        return disjoint_copies(self.inner.evaluate(), self.count)

    def __str__(self) -> str:
        return f"{self.count}*{self.inner}"


@dataclass(frozen=True)
class Join:
    parts: Tuple["FamilyExpr", ...]

    @property
    def order(self) -> int:
        return sum(part.order for part in self.parts)

    def evaluate(self) -> Graph:
        graph = self.parts[0].evaluate()
        for part in self.parts[1:]:
            graph = join(graph, part.evaluate())
        return graph

    def __str__(self) -> str:
        return "v".join(str(part) for part in self.parts)


@dataclass(frozen=True)
class DisjointUnion:
    parts: Tuple["FamilyExpr", ...]

    @property
    def order(self) -> int:
        return sum(part.order for part in self.parts)

    def evaluate(self) -> Graph:
        graph = self.parts[0].evaluate()
        for part in self.parts[1:]:
            graph = disjoint_union(graph, part.evaluate())
        return graph

    def __str__(self) -> str:
        return "+".join(str(part) for part in self.parts)


FamilyExpr = Union[Atom, Group, Copies, Join, DisjointUnion]


class _Parser:
    """Recursive-descent parser over the expression text."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _error(self, message: str, offset: Optional[int] = None) -> FamilyParseError:
        return FamilyParseError(message, self.pos if offset is None else offset)

    def _int(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self._error("expected a number")
        value = int(self.text[start:self.pos])
        if value < 1:
            raise self._error("sizes and counts must be positive", start)
        return value

    def parse(self) -> FamilyExpr:
        if not self._peek():
            raise self._error("empty expression")
        expr = self.expr()
        if self._peek():
            raise self._error(f"unexpected {self.text[self.pos]!r}")
        return expr

    def expr(self) -> FamilyExpr:
        parts = [self.term()]
        while self._peek() == "+":
            self.pos += 1
            parts.append(self.term())
        return parts[0] if len(parts) == 1 else DisjointUnion(tuple(parts))

    def term(self) -> FamilyExpr:
        parts = [self.factor()]
        while self._peek() == "v":
            self.pos += 1
            parts.append(self.factor())
        return parts[0] if len(parts) == 1 else Join(tuple(parts))

    def factor(self) -> FamilyExpr:
        if self._peek().isdigit():
            count = self._int()
            if self._peek() != "*":
                raise self._error("expected '*' after a copy count")
            self.pos += 1
            return Copies(count, self.atom())
        return self.atom()

    def atom(self) -> Union[Atom, Group]:
        char = self._peek()
        start = self.pos
        if char == "(":
            self.pos += 1
            inner = self.expr()
            if self._peek() != ")":
                raise self._error("unbalanced parenthesis, expected ')'")
            self.pos += 1
            return Group(inner)
        if char not in ("K", "P", "C", "E"):
            raise self._error(f"unknown atom {char!r}" if char else "unexpected end of expression")
        self.pos += 1
        sizes = [self._int()]
        if char == "K":
            while self._peek() == ",":
                self.pos += 1
                sizes.append(self._int())
        if char == "C" and sizes[0] < 3:
            raise self._error("a cycle needs at least 3 vertices", start)
        minus_edge = False
        if self._peek() == "-":
            if self.text[self.pos:self.pos + 2] != "-e":
                raise self._error("expected '-e'")
            if char != "K" or len(sizes) != 1 or sizes[0] < 2:
                raise self._error("'-e' needs a complete atom K n with n >= 2", self.pos)
            self.pos += 2
            minus_edge = True
        return Atom(char, tuple(sizes), minus_edge)


def parse_family(text: str) -> FamilyExpr:
    """
    Parse a family expression.

    Args:
        text (str): Expression text; whitespace between tokens is ignored

    Returns:
        FamilyExpr: Syntax tree whose ``str`` is the normalized expression

    Raises:
        FamilyParseError: With the offset of the first problem
    """
    return _Parser(text).parse()


def build_graph(text: str) -> Graph:
    """Parse and evaluate a family expression."""
    return parse_family(text).evaluate()


def _component_label(h: Graph) -> Optional[str]:
    k = h.n
    full = k * (k - 1) // 2
    degrees = h.degrees()
    if k == 1:
        return "K1"
    if h.m == full:
        return f"K{k}"
    if h.m == k - 1 and max(degrees) <= 2:
        return f"P{k}"
    if h.m == k and all(d == 2 for d in degrees):
        return f"C{k}"
    if k >= 4 and h.m == full - 1:
        return f"K{k}-e"
    shape = is_complete_multipartite_plus_isolated(h)
    if shape is not None and shape.isolated == 0:
        return "K" + ",".join(str(p) for p in shape.parts)
    return None


def describe(g: Graph) -> Optional[str]:
    """
    Label a graph as a union of recognized components, e.g. ``K2+2*K1``.

    Components may be complete, paths, cycles, complete minus an edge or
    complete multipartite; larger components come first and isolated
    vertices last. Edgeless graphs of order >= 2 are labeled ``E n``. The
    label is returned only if it evaluates to a graph isomorphic to ``g``.

    Returns:
        Optional[str]: The label, or None when some component is not recognized
    """
    if g.n == 0:
        return None
    if g.m == 0 and g.n >= 2:
        label = f"E{g.n}"
    else:
        labels: List[Tuple[int, str]] = []
        for component in g.components():
            component_label = _component_label(induced_subgraph(g, component))
            if component_label is None:
                return None
            labels.append((len(component), component_label))
        counts = Counter(labels)
        ordered = sorted(counts, key=lambda item: (-item[0], item[1]))
        label = "+".join(name if counts[(size, name)] == 1 else f"{counts[(size, name)]}*{name}"
                         for size, name in ordered)
    if canonical_form(build_graph(label)) != canonical_form(g):
        logger.debug(f"label {label} does not reproduce {g!r}")
        return None
    return label
