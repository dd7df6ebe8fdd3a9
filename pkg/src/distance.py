"""
Spectral Distance Module

This module provides the ℓ¹ distance σ(G, H) and the squared ℓ² distance
λ(G, H) between the descending-sorted adjacency spectra of two graphs of the
same order, the closed form for the ℓ¹ distance to the complete graph, and a
vectorized form used when scanning whole spectra tables.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .graph_core import Graph
from .spectrum import (
    EXACT_ORDER_LIMIT,
    Spectrum,
    char_poly,
    count_eigenvalues_at_least,
    eigenvalues,
    eigenvalues_batch,
)

logger = logging.getLogger(__name__)

EXACT_ZERO_BAND = 1e-7


class DistanceError(ValueError):
    """Raised for distance requests between incompatible graphs or spectra."""


class Norm(str, Enum):
    """Spectral distance norms: ℓ¹ and the squared ℓ² sum."""

    L1 = "l1"
    L2SQ = "l2sq"

    @classmethod
    def parse(cls, value) -> "Norm":
        if isinstance(value, Norm):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as e:
            raise DistanceError(f"unknown norm {value!r}, expected one of l1, l2sq") from e

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DistanceReport:
    """Both distances between two spectra plus the per-index absolute differences."""

    l1: float
    l2sq: float
    per_index: Tuple[float, ...]
    exact_zero: bool = False

    def value(self, norm) -> float:
        return self.l1 if Norm.parse(norm) is Norm.L1 else self.l2sq


def _check_orders(g: Graph, h: Graph) -> None:
    if g.n != h.n:
        logger.error(f"Spectral distance between orders {g.n} and {h.n} requested")
        raise DistanceError(f"spectral distance needs graphs of equal order, got {g.n} and {h.n}")


def spectral_distance(g: Graph, h: Graph) -> DistanceReport:
    """
    Compare the sorted spectra of ``g`` and ``h`` index by index.

    When the ℓ¹ difference is within 1e-7 and the characteristic polynomials
    agree exactly, both distances are reported as exactly zero.

    Raises:
        DistanceError: If the orders differ
    """
    _check_orders(g, h)
    n = g.n
    if n == 0:
        return DistanceReport(0.0, 0.0, (), True)
    values = eigenvalues_batch([g, h])
    diff = np.abs(values[0] - values[1])
    l1 = math.fsum(diff)
    if l1 <= EXACT_ZERO_BAND and n <= EXACT_ORDER_LIMIT and char_poly(g) == char_poly(h):
        return DistanceReport(0.0, 0.0, (0.0,) * n, True)
    return DistanceReport(l1, math.fsum(diff * diff), tuple(float(d) for d in diff))


def sigma(g: Graph, h: Graph) -> float:
    """σ(G, H): sum of absolute differences of the sorted spectra."""
    return spectral_distance(g, h).l1


def lambda_sq(g: Graph, h: Graph) -> float:
    """λ(G, H): sum of squared differences of the sorted spectra (no square root)."""
    return spectral_distance(g, h).l2sq


def distance(g: Graph, h: Graph, norm="l1") -> float:
    return spectral_distance(g, h).value(norm)


def sigma_to_complete(n: int, g: Graph, spectrum: Optional[Spectrum] = None) -> float:
    """
    σ(K_n, G) from the spectrum of G alone.

    With n* the number of eigenvalues of G that are >= -1 (exact near -1),
    σ(K_n, G) = 2(n* - 1 + λ_2 + ... + λ_{n*}).

    Args:
        n (int): Order of the complete graph
        g (Graph): Graph of order ``n``
        spectrum (Optional[Spectrum]): Precomputed spectrum of ``g``

    Returns:
        float: The ℓ¹ distance

    Raises:
        DistanceError: If ``g`` does not have order ``n`` or ``n < 1``
    """
    if n < 1 or g.n != n:
        logger.error(f"sigma_to_complete({n}) called with a graph of order {g.n}")
        raise DistanceError(f"expected a graph of order {n} >= 1, got order {g.n}")
    spectrum = spectrum or eigenvalues(g)
    n_star = count_eigenvalues_at_least(g, -1, spectrum)
    return 2 * (n_star - 1 + math.fsum(spectrum.values[1:n_star]))


def distance_rows(query: np.ndarray, values: np.ndarray, norm="l1") -> np.ndarray:
    """
    Distances from one spectrum to every row of a spectra table.

    Args:
        query (np.ndarray): Shape ``(n,)``, descending
        values (np.ndarray): Shape ``(B, n)``, each row descending
        norm: ``"l1"`` or ``"l2sq"``

    Returns:
        np.ndarray: Shape ``(B,)``
    """
    query = np.asarray(query, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != query.shape[0]:
        raise DistanceError(f"spectra table of shape {values.shape} does not match a query of length {query.shape[0]}")
    diff = np.abs(values - query[None, :])
    if Norm.parse(norm) is Norm.L1:
        return diff.sum(axis=1)
    return (diff * diff).sum(axis=1)
