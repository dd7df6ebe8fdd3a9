"""
Adjacency Spectrum Module

This module computes adjacency eigenvalues with a batched cyclic Jacobi solver
on torch tensors, exact integer characteristic polynomials, exact eigenvalue
counts at integer and algebraic thresholds, graph energy, and the closed-form
spectra of the complete, null, complete bipartite and K_n minus an edge
families.
"""

import logging
import math
import numbers
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import sympy
import torch
from sympy import ZZ, Poly
from sympy.polys.matrices import DomainMatrix

from .graph_core import Graph, adjacency_stack

logger = logging.getLogger(__name__)

MAX_SWEEPS = 50
OFF_DIAGONAL_TOLERANCE = 1e-14
THRESHOLD_BAND = 1e-7
EXACT_ORDER_LIMIT = 20

X = sympy.Symbol("x")
ONE_THIRD = sympy.Rational(1, 3)
SQRT2_MINUS_1 = sympy.sqrt(2) - 1

_INTERVAL_EPS = sympy.Rational(1, 10**30)
_MAX_REFINEMENTS = 40


class SpectrumError(ValueError):
    """Raised for invalid spectrum requests (bad family parameters, exact limit)."""


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi sweeps do not converge within the sweep budget."""


def abs_err_bound(n: int) -> float:
    """Guaranteed absolute eigenvalue error for order ``n``."""
    return 1e-10 if n <= 12 else 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Adjacency eigenvalues sorted descending, with a per-eigenvalue error bound."""

    values: Tuple[float, ...]
    abs_err: float

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, index):
        return self.values[index]

    def eigenvalue(self, k: int) -> float:
        """The k-th largest eigenvalue, counting from 1."""
        return self.values[k - 1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class CharPoly:
    """Exact characteristic polynomial, coefficients c_0..c_n (c_n = 1)."""

    coeffs: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_poly(self) -> Poly:
        return Poly(list(reversed(self.coeffs)), X, domain=ZZ)

    def __call__(self, x):
        value = 0
        for c in reversed(self.coeffs):
            value = value * x + c
        return value

    def __str__(self) -> str:
        return str(self.to_poly().as_expr())


# numeric layer

@torch.no_grad()
def jacobi_eigenvalues(matrices: torch.Tensor, max_sweeps: int = MAX_SWEEPS,
                       tolerance: float = OFF_DIAGONAL_TOLERANCE) -> torch.Tensor:
    """
    Eigenvalues of a batch of real symmetric matrices by cyclic Jacobi rotations.

    Pairs (p, q) are swept in row order. A batch member stops rotating once its
    off-diagonal Frobenius mass is at most ``tolerance`` times its Frobenius
    norm; from then on it only sees identity rotations, so its result does not
    depend on the rest of the batch.

    Args:
        matrices (torch.Tensor): Shape ``(B, n, n)``, symmetric
        max_sweeps (int): Sweep budget
        tolerance (float): Relative off-diagonal stopping threshold

    Returns:
        torch.Tensor: ``float64`` eigenvalues of shape ``(B, n)``, descending

    Raises:
        SpectrumError: If the input is not a batch of square matrices
        ConvergenceError: If some member is still active after ``max_sweeps``
    """
    if matrices.dim() != 3 or matrices.shape[1] != matrices.shape[2]:
        raise SpectrumError(f"expected a (B, n, n) batch, got shape {tuple(matrices.shape)}")
    a = matrices.to(dtype=torch.float64).clone()
    batch, n, _ = a.shape
    if n == 0:
        return a.new_zeros((batch, 0))

    off_mask = ~torch.eye(n, dtype=torch.bool)
    threshold = tolerance * torch.sqrt((a * a).sum(dim=(1, 2)))
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    ones = torch.ones(batch, dtype=torch.float64)
    zeros = torch.zeros(batch, dtype=torch.float64)

    for sweep in range(max_sweeps + 1):
        off = torch.sqrt((a * a * off_mask).sum(dim=(1, 2)))
        active = off > threshold
        if not bool(active.any()):
            break
        if sweep == max_sweeps:
            logger.error(f"Jacobi did not converge for {int(active.sum())} of {batch} matrices")
            raise ConvergenceError(f"no convergence after {max_sweeps} sweeps")
        for p, q in pairs:
            apq = a[:, p, q]
            rotate = active & (apq != 0)
            if not bool(rotate.any()):
                continue
            theta = (a[:, q, q] - a[:, p, p]) / (2 * torch.where(rotate, apq, ones))
            sign = torch.where(theta < 0, -ones, ones)
            t = sign / (theta.abs() + torch.hypot(theta, ones))
            c = 1 / torch.sqrt(1 + t * t)
            s = t * c
            c = torch.where(rotate, c, ones)[:, None]
            s = torch.where(rotate, s, zeros)[:, None]

            row_p = a[:, p, :].clone()
            row_q = a[:, q, :].clone()
            a[:, p, :] = c * row_p - s * row_q
            a[:, q, :] = s * row_p + c * row_q
            col_p = a[:, :, p].clone()
            col_q = a[:, :, q].clone()
            a[:, :, p] = c * col_p - s * col_q
            a[:, :, q] = s * col_p + c * col_q

            a[:, p, q] = torch.where(rotate, zeros, a[:, p, q])
            a[:, q, p] = torch.where(rotate, zeros, a[:, q, p])

    diagonal = torch.diagonal(a, dim1=1, dim2=2)
    return torch.sort(diagonal, dim=1, descending=True).values


def eigenvalues_batch(graphs: Sequence[Graph]) -> np.ndarray:
    """
    Adjacency eigenvalues of same-order graphs in one solver call.

    Returns:
        np.ndarray: Shape ``(len(graphs), n)``, each row descending
    """
    if not graphs:
        return np.zeros((0, 0), dtype=np.float64)
    stack = torch.from_numpy(adjacency_stack(graphs))
    return jacobi_eigenvalues(stack).numpy()


def eigenvalues(g: Graph) -> Spectrum:
    """All adjacency eigenvalues of ``g``, descending; order 0 gives an empty spectrum."""
    values = eigenvalues_batch([g])[0]
    return Spectrum(tuple(float(v) for v in values), abs_err_bound(g.n))


def energy(g: Graph, spectrum: Optional[Spectrum] = None) -> float:
    """Graph energy, the sum of absolute eigenvalues."""
    spectrum = spectrum or eigenvalues(g)
    return math.fsum(abs(v) for v in spectrum.values)


# exact layer

@lru_cache(maxsize=1 << 16)
def char_poly(g: Graph) -> CharPoly:
    """
    Exact characteristic polynomial det(xI - A) by the division-free Berkowitz algorithm.

    Raises:
        SpectrumError: Above the exact order limit
    """
    if g.n > EXACT_ORDER_LIMIT:
        raise SpectrumError(f"exact characteristic polynomials are limited to order {EXACT_ORDER_LIMIT}")
    if g.n == 0:
        return CharPoly((1,))
    rows = [[ZZ(int(g.rows[i] >> j & 1)) for j in range(g.n)] for i in range(g.n)]
    coeffs = DomainMatrix(rows, (g.n, g.n), ZZ).charpoly()
    return CharPoly(tuple(int(c) for c in reversed(coeffs)))


def _deflate(poly: Poly, divisor: Poly) -> Tuple[int, Poly]:
    count = 0
    while poly.degree() >= divisor.degree():
        quotient, remainder = poly.div(divisor)
        if not remainder.is_zero:
            break
        poly = quotient
        count += 1
    return count, poly


def _minimal_poly(theta: sympy.Expr) -> Poly:
    return Poly(sympy.minimal_polynomial(theta, X), X, domain=ZZ)


@lru_cache(maxsize=1 << 12)
def precise_eigenvalues(p: CharPoly, digits: int = 30) -> Tuple[sympy.Float, ...]:
    """Roots of ``p`` (with multiplicity) to ``digits`` significant digits, descending."""
    roots = sympy.real_roots(p.to_poly())
    if len(roots) != p.degree:
        raise SpectrumError(f"{p} has non-real roots")
    return tuple(sympy.Float(sympy.N(r, digits), digits) for r in reversed(roots))


def root_multiplicity(p: CharPoly, threshold) -> int:
    """Exact multiplicity of an integer or algebraic ``threshold`` as a root of ``p``."""
    theta = sympy.sympify(threshold)
    if theta.is_Rational and not theta.is_Integer:
        # roots of monic integer polynomials are algebraic integers
        return 0
    return _deflate(p.to_poly(), _minimal_poly(theta))[0]


def integer_root_multiplicity(p: CharPoly, r: int) -> int:
    """Multiplicity of the integer ``r`` as a root of ``p``, by repeated exact division."""
    return _deflate(p.to_poly(), Poly(X - int(r), X, domain=ZZ))[0]


def _roots_above(poly: Poly, theta: sympy.Expr) -> int:
    # poly has no root equal to theta
    count = 0
    _, factors = poly.sqf_list()
    for factor, exponent in factors:
        for (lo, hi), _ in factor.intervals(eps=_INTERVAL_EPS):
            for _ in range(_MAX_REFINEMENTS):
                if not (lo <= theta and theta <= hi):
                    break
                lo, hi = factor.refine_root(lo, hi, eps=(hi - lo) / 1024)
            else:
                raise SpectrumError(f"could not separate a root from {theta}")
            if lo > theta:
                count += exponent
    return count


def exact_count_at_least(p: CharPoly, threshold) -> int:
    """
    Exact number of roots of ``p`` (with multiplicity) that are >= ``threshold``.

    Rational thresholds use Sturm counts on the square-free factors; irrational
    algebraic thresholds deflate the minimal polynomial and place the remaining
    roots with rational isolating intervals.
    """
    theta = sympy.sympify(threshold)
    poly = p.to_poly()
    if theta.is_Rational:
        _, factors = poly.sqf_list()
        return sum(exponent * factor.count_roots(inf=theta) for factor, exponent in factors)
    minimal = _minimal_poly(theta)
    multiplicity, rest = _deflate(poly, minimal)
    count = 0
    if multiplicity:
        conjugates_above = sum(1 for (lo, _hi), _ in minimal.intervals(eps=_INTERVAL_EPS) if lo > theta)
        count += multiplicity * (1 + conjugates_above)
    return count + _roots_above(rest, theta)


def _threshold(threshold) -> Tuple[float, Optional[sympy.Expr]]:
    """Numeric value and, when exact resolution is possible, the exact threshold."""
    if isinstance(threshold, sympy.Basic):
        return float(threshold), threshold
    if isinstance(threshold, numbers.Integral):
        return float(threshold), sympy.Integer(int(threshold))
    value = float(threshold)
    if value.is_integer():
        return value, sympy.Integer(int(value))
    return value, None


def count_eigenvalues_at_least(g: Graph, threshold, spectrum: Optional[Spectrum] = None) -> int:
    """
    Number of eigenvalues >= ``threshold`` (the n* count at threshold -1).

    Eigenvalues within 1e-7 of an integer or sympy algebraic threshold are
    resolved exactly on the characteristic polynomial; otherwise the numeric
    spectrum decides.
    """
    spectrum = spectrum or eigenvalues(g)
    value, exact = _threshold(threshold)
    near = any(abs(v - value) <= THRESHOLD_BAND for v in spectrum.values)
    if exact is None or not near:
        return sum(1 for v in spectrum.values if v >= value)
    if g.n > EXACT_ORDER_LIMIT:
        logger.warning(f"order {g.n} above the exact limit, resolving threshold {threshold} numerically")
        return sum(1 for v in spectrum.values if v >= value - THRESHOLD_BAND)
    return exact_count_at_least(char_poly(g), exact)


def count_eigenvalues_above(g: Graph, threshold, spectrum: Optional[Spectrum] = None) -> int:
    """Number of eigenvalues strictly greater than ``threshold``, exact in the band."""
    spectrum = spectrum or eigenvalues(g)
    value, exact = _threshold(threshold)
    near = any(abs(v - value) <= THRESHOLD_BAND for v in spectrum.values)
    if exact is None or not near:
        return sum(1 for v in spectrum.values if v > value)
    if g.n > EXACT_ORDER_LIMIT:
        logger.warning(f"order {g.n} above the exact limit, resolving threshold {threshold} numerically")
        return sum(1 for v in spectrum.values if v > value + THRESHOLD_BAND)
    p = char_poly(g)
    return exact_count_at_least(p, exact) - root_multiplicity(p, exact)


def compare_eigenvalue(g: Graph, k: int, threshold, spectrum: Optional[Spectrum] = None) -> int:
    """
    Sign of λ_k(g) - threshold (k counted from 1), exact inside the threshold band.

    Returns:
        int: -1, 0 or 1
    """
    spectrum = spectrum or eigenvalues(g)
    if not 1 <= k <= len(spectrum):
        raise SpectrumError(f"eigenvalue index {k} outside 1..{len(spectrum)}")
    value, exact = _threshold(threshold)
    eigenvalue = spectrum.eigenvalue(k)
    if exact is None or abs(eigenvalue - value) > THRESHOLD_BAND:
        return (eigenvalue > value) - (eigenvalue < value)
    if g.n > EXACT_ORDER_LIMIT:
        logger.warning(f"order {g.n} above the exact limit, λ_{k} within {THRESHOLD_BAND} of {threshold} taken as equal")
        return 0
    p = char_poly(g)
    at_least = exact_count_at_least(p, exact)
    above = at_least - root_multiplicity(p, exact)
    if above >= k:
        return 1
    if at_least >= k:
        return 0
    return -1


# closed forms

CLOSED_FORM_FAMILIES = ("complete", "complete_bipartite", "complete_minus_edge", "empty")


def closed_form_expressions(family: str, *params: int) -> List[sympy.Expr]:
    """
    Exact closed-form spectrum of a standard family, descending.

    Args:
        family (str): One of ``CLOSED_FORM_FAMILIES``
        *params (int): n, or p and q for ``complete_bipartite``

    Raises:
        SpectrumError: On an unknown family or invalid parameters
    """
    try:
        if family == "complete":
            (n,) = params
            if n < 1:
                raise SpectrumError(f"complete family needs n >= 1, got {n}")
            values = [sympy.Integer(n - 1)] + [sympy.Integer(-1)] * (n - 1)
        elif family == "empty":
            (n,) = params
            if n < 1:
                raise SpectrumError(f"empty family needs n >= 1, got {n}")
            values = [sympy.Integer(0)] * n
        elif family == "complete_bipartite":
            p, q = params
            if p < 1 or q < 1:
                raise SpectrumError(f"complete_bipartite needs p, q >= 1, got {p}, {q}")
            root = sympy.sqrt(p * q)
            values = [root] + [sympy.Integer(0)] * (p + q - 2) + [-root]
        elif family == "complete_minus_edge":
            (n,) = params
            if n < 2:
                raise SpectrumError(f"complete_minus_edge needs n >= 2, got {n}")
            if n == 2:
                values = [sympy.Integer(0)] * 2
            else:
                disc = sympy.sqrt(n * n + 2 * n - 7)
                values = ([(n - 3 + disc) / 2, sympy.Integer(0)] + [sympy.Integer(-1)] * (n - 3)
                          + [(n - 3 - disc) / 2])
        else:
            raise SpectrumError(f"unknown closed-form family {family!r}")
    except (TypeError, ValueError) as e:
        if isinstance(e, SpectrumError):
            raise
        raise SpectrumError(f"bad parameters {params} for family {family!r}") from e
    return sorted(values, key=float, reverse=True)


def closed_form_spectrum(family: str, *params: int) -> Spectrum:
    """Closed-form spectrum of a standard family evaluated to floats."""
    values = closed_form_expressions(family, *params)
    return Spectrum(tuple(float(v) for v in values), 1e-15)
