"""
Unit tests for the spectral distance module.
"""

import math

import numpy as np
import pytest

from src.distance import (
    DistanceError,
    DistanceReport,
    Norm,
    distance,
    distance_rows,
    lambda_sq,
    sigma,
    sigma_to_complete,
    spectral_distance,
)
from src.enumeration import enumerate_graphs
from src.graph_core import add_isolated, complete, complete_bipartite, cycle, delete_edge, empty, path
from src.spectrum import eigenvalues_batch, energy


class TestNorm:
    """Test cases for norm parsing."""

    def test_parse(self):
        """Test parsing names and enum values."""
        assert Norm.parse("l1") is Norm.L1
        assert Norm.parse("L2SQ") is Norm.L2SQ
        assert Norm.parse(Norm.L1) is Norm.L1
        assert str(Norm.L2SQ) == "l2sq"

    def test_unknown(self):
        """Test that unknown norms raise DistanceError."""
        with pytest.raises(DistanceError):
            Norm.parse("l2")


class TestSpectralDistance:
    """Test cases for σ and λ."""

    def test_square_and_star(self):
        """Test σ(K_{2,2}, K_{1,3}) = 2(2 - √3)."""
        gap = 2 - math.sqrt(3)
        assert sigma(complete_bipartite(2, 2), complete_bipartite(1, 3)) == pytest.approx(2 * gap, abs=1e-10)
        assert lambda_sq(complete_bipartite(2, 2), complete_bipartite(1, 3)) == pytest.approx(2 * gap**2, abs=1e-10)

    def test_symmetric(self):
        """Test that distances are symmetric."""
        g, h = path(5), cycle(5)
        assert sigma(g, h) == pytest.approx(sigma(h, g), abs=1e-12)

    def test_report(self):
        """Test the per-index breakdown."""
        report = spectral_distance(complete(3), empty(3))
        assert isinstance(report, DistanceReport)
        np.testing.assert_allclose(report.per_index, [2, 1, 1], atol=1e-10)
        assert report.l1 == pytest.approx(4.0, abs=1e-10)
        assert report.l2sq == pytest.approx(6.0, abs=1e-10)
        assert report.value("l2sq") == report.l2sq
        assert not report.exact_zero

    def test_cospectral_pair_is_exact_zero(self):
        """Test that K_{1,4} and C_4 + K_1 are at distance exactly zero."""
        report = spectral_distance(complete_bipartite(1, 4), add_isolated(cycle(4), 1))
        assert report.exact_zero
        assert report.l1 == 0.0
        assert report.l2sq == 0.0

    def test_distance_dispatch(self):
        """Test the norm-selecting entry point."""
        g, h = complete(4), delete_edge(complete(4), 0, 1)
        assert distance(g, h, "l1") == sigma(g, h)
        assert distance(g, h, Norm.L2SQ) == lambda_sq(g, h)

    def test_order_mismatch(self):
        """Test that graphs of different order raise DistanceError."""
        with pytest.raises(DistanceError):
            sigma(complete(3), complete(4))

    def test_order_zero(self):
        """Test the empty spectra."""
        report = spectral_distance(empty(0), empty(0))
        assert report.l1 == 0.0
        assert report.exact_zero


class TestDistanceToComplete:
    """Test cases for the closed form of σ(K_n, G)."""

    @pytest.mark.parametrize("g", [
        empty(5),
        path(5),
        cycle(6),
        complete_bipartite(2, 3),
        add_isolated(complete(4), 2),
        delete_edge(complete(6), 2, 3),
        complete(4),
    ])
    def test_matches_direct(self, g):
        """Test the closed form against the direct distance."""
        assert sigma_to_complete(g.n, g) == pytest.approx(sigma(complete(g.n), g), abs=1e-8)

    def test_order_mismatch(self):
        """Test that a graph of the wrong order raises DistanceError."""
        with pytest.raises(DistanceError):
            sigma_to_complete(5, complete(4))


class TestDistanceRows:
    """Test cases for vectorized distances."""

    def test_rows(self):
        """Test ℓ¹ and squared ℓ² rows."""
        query = np.array([1.0, 0.0, -1.0])
        values = np.array([[1.0, 0.0, -1.0], [2.0, -1.0, -1.0]])
        np.testing.assert_allclose(distance_rows(query, values, "l1"), [0.0, 2.0])
        np.testing.assert_allclose(distance_rows(query, values, "l2sq"), [0.0, 2.0])

    def test_shape_mismatch(self):
        """Test that mismatched shapes raise DistanceError."""
        with pytest.raises(DistanceError):
            distance_rows(np.zeros(3), np.zeros((2, 4)))


class TestDistanceProperties:
    """Test cases for metric properties over every graph of small orders."""

    def spectra(self, n):
        return eigenvalues_batch(list(enumerate_graphs(n)))

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_pseudometric(self, n):
        """Test symmetry, zero self-distance and the triangle inequality on all triples."""
        values = self.spectra(n)
        d = np.stack([distance_rows(row, values, "l1") for row in values])
        assert (d >= 0).all()
        np.testing.assert_allclose(np.diag(d), 0.0, atol=1e-12)
        np.testing.assert_allclose(d, d.T, atol=1e-12)
        assert (d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-9).all()

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_squared_norm_below_sigma_squared(self, n):
        """Test λ(G, H) <= σ(G, H)² for every pair."""
        values = self.spectra(n)
        for row in values:
            l1 = distance_rows(row, values, "l1")
            l2sq = distance_rows(row, values, "l2sq")
            assert (l2sq <= l1 ** 2 + 1e-9).all()

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
    def test_distance_from_null_graph_is_energy(self, n):
        """Test σ(nK_1, H) = E(H)."""
        for h in enumerate_graphs(n):
            assert sigma(empty(n), h) == pytest.approx(energy(h), abs=1e-9)

    @pytest.mark.slow
    def test_distance_from_null_graph_is_energy_order_eight(self):
        """Test σ(8K_1, H) = E(H) over all 12,346 classes, vectorized."""
        graphs = list(enumerate_graphs(8))
        values = eigenvalues_batch(graphs)
        np.testing.assert_allclose(distance_rows(np.zeros(8), values, "l1"), np.abs(values).sum(axis=1), atol=1e-9)
        for h in graphs[::500]:
            assert sigma(empty(8), h) == pytest.approx(energy(h), abs=1e-9)
