"""
Unit tests for the spectrum module.
"""

import logging
import math

import numpy as np
import pytest
import sympy
import torch

from src.enumeration import enumerate_graphs
from src.graph_core import (
    add_isolated,
    adjacency_stack,
    complete,
    complete_bipartite,
    complete_multipartite,
    cycle,
    delete_edge,
    disjoint_union,
    empty,
    join,
    path,
)
from src.spectrum import (
    ONE_THIRD,
    SQRT2_MINUS_1,
    CharPoly,
    ConvergenceError,
    Spectrum,
    SpectrumError,
    abs_err_bound,
    char_poly,
    closed_form_expressions,
    closed_form_spectrum,
    compare_eigenvalue,
    count_eigenvalues_above,
    count_eigenvalues_at_least,
    eigenvalues,
    eigenvalues_batch,
    energy,
    exact_count_at_least,
    integer_root_multiplicity,
    jacobi_eigenvalues,
    precise_eigenvalues,
    root_multiplicity,
)


def k1_plus_k2():
    return disjoint_union(complete(1), complete(2))


class TestNumericSpectrum:
    """Test cases for the Jacobi eigensolver."""

    def test_complete_graph(self):
        """Test the spectrum of K_5."""
        spectrum = eigenvalues(complete(5))
        assert isinstance(spectrum, Spectrum)
        np.testing.assert_allclose(spectrum.values, [4, -1, -1, -1, -1], atol=1e-10)
        assert spectrum.abs_err == 1e-10

    def test_path_and_cycle(self):
        """Test spectra of P_3 and C_4."""
        np.testing.assert_allclose(eigenvalues(path(3)).values, [math.sqrt(2), 0, -math.sqrt(2)], atol=1e-10)
        np.testing.assert_allclose(eigenvalues(cycle(4)).values, [2, 0, 0, -2], atol=1e-10)

    def test_matches_numpy(self):
        """Test against numpy on a batch of random graphs."""
        rng = np.random.default_rng(7)
        for n in (5, 9, 14):
            upper = np.triu(rng.integers(0, 2, size=(n, n)), 1)
            matrix = (upper + upper.T).astype(np.float64)
            expected = np.sort(np.linalg.eigvalsh(matrix))[::-1]
            result = jacobi_eigenvalues(torch.from_numpy(matrix)[None])[0].numpy()
            np.testing.assert_allclose(result, expected, atol=abs_err_bound(n))

    def test_descending_and_trace(self):
        """Test ordering and that eigenvalues sum to zero."""
        values = eigenvalues(join(path(4), cycle(5))).values
        assert list(values) == sorted(values, reverse=True)
        assert abs(sum(values)) < 1e-9

    def test_batch_independent(self):
        """Test that a graph's eigenvalues do not depend on its batch."""
        g = join(path(3), cycle(4))
        alone = eigenvalues_batch([g])[0]
        mixed = eigenvalues_batch([complete(7), g, empty(7), cycle(7)])[1]
        np.testing.assert_allclose(alone, mixed, rtol=0, atol=1e-12)

    def test_empty_order(self):
        """Test the graph of order zero."""
        assert len(eigenvalues(empty(0))) == 0

    def test_bad_shape(self):
        """Test that non-square batches are rejected."""
        with pytest.raises(SpectrumError):
            jacobi_eigenvalues(torch.zeros(3, 3))

    def test_sweep_budget(self):
        """Test that an exhausted sweep budget raises ConvergenceError."""
        matrix = torch.from_numpy(path(4).adjacency_matrix().astype(np.float64))[None]
        with pytest.raises(ConvergenceError):
            jacobi_eigenvalues(matrix, max_sweeps=0)

    def test_eigenvalue_index(self):
        """Test 1-based eigenvalue access."""
        spectrum = eigenvalues(complete_bipartite(2, 2))
        assert spectrum.eigenvalue(1) == pytest.approx(2.0, abs=1e-10)
        assert spectrum.eigenvalue(4) == pytest.approx(-2.0, abs=1e-10)
        assert spectrum.as_array().shape == (4,)

    def test_energy(self):
        """Test graph energy of K_{2,3}."""
        assert energy(complete_bipartite(2, 3)) == pytest.approx(2 * math.sqrt(6), abs=1e-9)
        assert energy(empty(4)) == pytest.approx(0.0, abs=1e-12)

    def test_error_bound(self):
        """Test the documented error bounds."""
        assert abs_err_bound(12) == 1e-10
        assert abs_err_bound(13) == 1e-9


class TestCharPoly:
    """Test cases for exact characteristic polynomials."""

    def test_triangle(self):
        """Test x^3 - 3x - 2 for K_3."""
        p = char_poly(complete(3))
        assert p == CharPoly((-2, -3, 0, 1))
        assert p.degree == 3
        assert p(2) == 0
        assert str(p) == "x**3 - 3*x - 2"

    def test_path(self):
        """Test x^3 - 2x for P_3."""
        assert char_poly(path(3)).coeffs == (0, -2, 0, 1)

    def test_order_zero(self):
        """Test the empty product."""
        assert char_poly(empty(0)).coeffs == (1,)

    def test_cospectral_mates(self):
        """Test that K_{1,4} and C_4 + K_1 share a characteristic polynomial."""
        assert char_poly(complete_bipartite(1, 4)) == char_poly(add_isolated(cycle(4), 1))

    def test_order_limit(self):
        """Test that exact work above order 20 is refused."""
        with pytest.raises(SpectrumError):
            char_poly(complete(21))


class TestExactThresholds:
    """Test cases for exact root multiplicities and threshold counts."""

    def test_integer_multiplicity(self):
        """Test multiplicities of integer roots."""
        assert integer_root_multiplicity(char_poly(complete(4)), -1) == 3
        assert integer_root_multiplicity(char_poly(cycle(4)), 0) == 2
        assert integer_root_multiplicity(char_poly(cycle(4)), 1) == 0

    def test_algebraic_multiplicity(self):
        """Test multiplicities of algebraic and rational thresholds."""
        p = char_poly(path(3))
        assert root_multiplicity(p, sympy.sqrt(2)) == 1
        assert root_multiplicity(p, ONE_THIRD) == 0
        assert root_multiplicity(char_poly(complete(4)), -1) == 3

    def test_exact_counts(self):
        """Test exact counts of roots at or above a threshold."""
        p = char_poly(path(3))
        assert exact_count_at_least(p, 0) == 2
        assert exact_count_at_least(p, sympy.sqrt(2)) == 1
        assert exact_count_at_least(p, -sympy.sqrt(2)) == 3
        assert exact_count_at_least(p, ONE_THIRD) == 1

    def test_counts_at_integer_threshold(self):
        """Test n* counts at -1."""
        assert count_eigenvalues_at_least(complete(4), -1) == 4
        assert count_eigenvalues_above(complete(4), -1) == 1
        assert count_eigenvalues_at_least(path(3), 0) == 2
        assert count_eigenvalues_above(path(3), 0) == 1
        assert count_eigenvalues_at_least(path(3), 0.5) == 1

    def test_compare_eigenvalue(self):
        """Test exact comparisons inside the threshold band."""
        g = join(k1_plus_k2(), k1_plus_k2())
        assert compare_eigenvalue(g, 2, SQRT2_MINUS_1) == 0
        assert compare_eigenvalue(complete(5), 2, -1) == 0
        assert compare_eigenvalue(complete_bipartite(2, 3), 2, 0) == 0
        assert compare_eigenvalue(complete_bipartite(1, 3), 2, ONE_THIRD) == -1
        assert compare_eigenvalue(path(4), 1, 1) == 1

    def test_window_boundary_of_shape_member(self):
        """Test that (K_1 + C_4) join K_2 has its second eigenvalue above √2 - 1."""
        g = join(disjoint_union(complete(1), cycle(4)), complete(2))
        assert compare_eigenvalue(g, 2, SQRT2_MINUS_1) == 1

    def test_compare_above_exact_limit(self, caplog):
        """Test that an unresolved comparison above order 20 is reported."""
        with caplog.at_level(logging.WARNING):
            assert compare_eigenvalue(complete(21), 2, -1) == 0
        assert "above the exact limit" in caplog.text

    def test_precise_eigenvalues(self):
        """Test high-precision roots of K_4 minus an edge."""
        values = precise_eigenvalues(char_poly(delete_edge(complete(4), 0, 1)))
        expected = [(1 + sympy.sqrt(17)) / 2, 0, -1, (1 - sympy.sqrt(17)) / 2]
        assert all(abs(v - e) < sympy.Float(10) ** -25 for v, e in zip(values, expected))

    def test_compare_index_range(self):
        """Test that out-of-range indices raise SpectrumError."""
        with pytest.raises(SpectrumError):
            compare_eigenvalue(complete(3), 4, 0)


class TestClosedForms:
    """Test cases for closed-form spectra."""

    @pytest.mark.parametrize("family,params,graph", [
        ("complete", (5,), complete(5)),
        ("empty", (3,), empty(3)),
        ("complete_bipartite", (3, 4), complete_bipartite(3, 4)),
        ("complete_minus_edge", (5,), delete_edge(complete(5), 0, 1)),
        ("complete_minus_edge", (3,), path(3)),
    ])
    def test_matches_numeric(self, family, params, graph):
        """Test closed forms against the numeric solver."""
        np.testing.assert_allclose(closed_form_spectrum(family, *params).values, eigenvalues(graph).values, atol=1e-9)

    def test_complete_minus_edge_of_two(self):
        """Test that K_2 minus its edge has spectrum {0, 0}."""
        assert closed_form_expressions("complete_minus_edge", 2) == [0, 0]

    def test_exact_values(self):
        """Test that closed forms stay exact."""
        assert closed_form_expressions("complete_bipartite", 2, 3)[0] == sympy.sqrt(6)

    def test_invalid_requests(self):
        """Test unknown families and bad parameters."""
        with pytest.raises(SpectrumError):
            closed_form_expressions("petersen", 10)
        with pytest.raises(SpectrumError):
            closed_form_expressions("complete", 0)
        with pytest.raises(SpectrumError):
            closed_form_expressions("complete_bipartite", 3)


class TestPrintedSpectra:
    """Test cases for spectra quoted to five digits."""

    def test_complete_tripartite(self):
        """Test Spec(K_{1,1,2}) = {2.56155, 0, -1, -1.56155}."""
        values = eigenvalues(complete_multipartite([1, 1, 2])).values
        np.testing.assert_allclose(values, [2.56155, 0, -1, -1.56155], atol=1e-5)

    def test_paw(self):
        """Test Spec((K_1 + K_2) join K_1) = {2.17009, 0.31111, -1, -1.48119}."""
        values = eigenvalues(join(k1_plus_k2(), complete(1))).values
        np.testing.assert_allclose(values, [2.17009, 0.31111, -1, -1.48119], atol=1e-5)


class TestClosedFormAccuracy:
    """Test cases for the solver against closed-form spectra of every parameter."""

    def cases(self, n):
        cases = [(complete(n), closed_form_spectrum("complete", n)),
                 (delete_edge(complete(n), 0, 1), closed_form_spectrum("complete_minus_edge", n))]
        for p in range(1, n // 2 + 1):
            cases.append((complete_bipartite(p, n - p), closed_form_spectrum("complete_bipartite", p, n - p)))
        return cases

    def check_order(self, n):
        cases = self.cases(n)
        stack = torch.from_numpy(adjacency_stack([g for g, _ in cases]))
        values = jacobi_eigenvalues(stack).numpy()
        expected = np.array([spectrum.values for _, spectrum in cases])
        np.testing.assert_allclose(values, expected, atol=1e-9)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 20])
    def test_small_orders(self, n):
        """Test K_n, K_n minus an edge and every K_{p,q} of order n."""
        self.check_order(n)

    @pytest.mark.slow
    def test_orders_up_to_fifty(self):
        """Test every parameter with order at most 50."""
        for n in range(2, 51):
            self.check_order(n)


class TestTraceIdentities:
    """Test cases for Σλ = 0 and Σλ² = 2m over every graph of an order."""

    def check_order(self, n):
        graphs = list(enumerate_graphs(n))
        values = eigenvalues_batch(graphs)
        edges = np.array([g.m for g in graphs], dtype=np.float64)
        np.testing.assert_allclose(values.sum(axis=1), 0.0, atol=1e-9)
        np.testing.assert_allclose((values ** 2).sum(axis=1), 2 * edges, atol=1e-8)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
    def test_numeric(self, n):
        """Test the identities on the solver output."""
        self.check_order(n)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [8, 9])
    def test_numeric_large(self, n):
        """Test the identities over all classes of orders 8 and 9."""
        self.check_order(n)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_characteristic_polynomial(self, n):
        """Test that x^(n-1) vanishes and x^(n-2) carries -m."""
        for g in enumerate_graphs(n):
            p = char_poly(g)
            assert p.coeffs[n] == 1
            assert p.coeffs[n - 1] == 0
            assert p.coeffs[n - 2] == -g.m
