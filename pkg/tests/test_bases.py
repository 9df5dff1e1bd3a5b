"""Basis systems: Bernstein, B-spline, hat; partition of unity checks."""

from __future__ import annotations

import numpy as np
import numpy.testing as nptest
import pytest

from helpers import bernstein_value, random_breakpoints

from pouspec.bases import (check_nonnegativity, check_partition_of_unity,
                           clamped_knots, make_bernstein_basis, make_bspline_basis,
                           make_hat_basis, BasisSystem)
from pouspec.errors import ConfigError
from pouspec.functions import ClosedForm, UNIT_INTERVAL, scaled


class TestBernstein:
    def test_degree_two_at_half(self):
        basis = make_bernstein_basis(2)
        vals = basis.values(np.array([0.5]))[:, 0]
        nptest.assert_allclose(vals, [0.25, 0.5, 0.25], atol=1e-15)

    def test_degree_one_endpoint(self):
        basis = make_bernstein_basis(1)
        vals = basis.values(np.array([0.0]))[:, 0]
        nptest.assert_allclose(vals, [1.0, 0.0], atol=0)

    def test_partition_sum_binomial(self):
        basis = make_bernstein_basis(2)
        assert basis.values(np.array([0.3])).sum() == pytest.approx(1.0, abs=1e-15)

    def test_rejects_degree_zero(self):
        with pytest.raises(ConfigError):
            make_bernstein_basis(0)

    def test_count(self):
        assert make_bernstein_basis(7).n == 8

    def test_recurrence_path_matches_binomial(self):
        # Degree above the closed-form cutoff exercises the recurrence.
        basis = make_bernstein_basis(40)
        xs = np.linspace(0, 1, 41)
        for k in (0, 7, 20, 40):
            expected = [bernstein_value(40, k, x) for x in xs]
            nptest.assert_allclose(basis.functions[k].values(xs), expected,
                                   rtol=1e-12, atol=1e-14)


class TestBSpline:
    def test_degree_zero_indicators(self):
        basis = make_bspline_basis([0.0, 0.5, 1.0], 0)
        assert basis.n == 2
        xs = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        nptest.assert_allclose(basis.functions[0].values(xs), [1, 1, 0, 0, 0], atol=0)
        nptest.assert_allclose(basis.functions[1].values(xs), [0, 0, 1, 1, 1], atol=0)

    def test_degree_one_hats(self):
        knots = clamped_knots([0.0, 0.5, 1.0], 1)
        nptest.assert_allclose(knots, [0.0, 0.0, 0.5, 1.0, 1.0])
        basis = make_bspline_basis(knots, 1)
        hats = make_hat_basis([0.0, 0.5, 1.0])
        xs = np.linspace(0, 1, 201)
        nptest.assert_allclose(basis.values(xs), hats.values(xs), atol=1e-14)

    def test_degree_three_partition_of_unity(self):
        rng = np.random.default_rng(2024)
        bp = random_breakpoints(rng, interior=4)
        basis = make_bspline_basis(clamped_knots(bp, 3), 3)
        sums = basis.values(np.linspace(0, 1, 1000)).sum(axis=0)
        nptest.assert_allclose(sums, 1.0, atol=1e-12)

    def test_rejects_decreasing_knots(self):
        with pytest.raises(ConfigError):
            make_bspline_basis([0.0, 0.0, 0.6, 0.4, 1.0, 1.0], 1)

    def test_rejects_unclamped(self):
        with pytest.raises(ConfigError):
            make_bspline_basis([0.0, 0.25, 0.5, 0.75, 1.0], 2)

    def test_rejects_too_few_knots(self):
        with pytest.raises(ConfigError):
            make_bspline_basis([0.0, 1.0], 1)

    def test_nonnegative_everywhere(self):
        basis = make_bspline_basis(clamped_knots([0.0, 0.2, 0.7, 1.0], 2), 2)
        assert basis.values(np.linspace(0, 1, 500)).min() >= 0.0


class TestHatBasis:
    def test_two_hats(self):
        basis = make_hat_basis([0.0, 1.0])
        xs = np.linspace(0, 1, 11)
        nptest.assert_allclose(basis.functions[0].values(xs), 1 - xs, atol=0)
        nptest.assert_allclose(basis.functions[1].values(xs), xs, atol=0)

    def test_middle_hat_ramp(self):
        basis = make_hat_basis([0.0, 0.5, 1.0])
        assert basis.functions[1](0.25) == 0.5

    def test_exact_partition_of_unity(self):
        basis = make_hat_basis([0.0, 0.1, 0.45, 0.8, 1.0])
        sums = basis.values(np.linspace(0, 1, 777)).sum(axis=0)
        nptest.assert_array_equal(sums, np.ones_like(sums))

    def test_interpolatory(self):
        nodes = np.array([0.0, 0.3, 0.55, 1.0])
        basis = make_hat_basis(nodes)
        vals = basis.values(nodes)
        nptest.assert_array_equal(vals, np.eye(4))

    def test_rejects_unsorted_nodes(self):
        with pytest.raises(ConfigError):
            make_hat_basis([0.0, 0.6, 0.4, 1.0])
        with pytest.raises(ConfigError):
            make_hat_basis([0.0, 0.5, 0.5, 1.0])

    def test_rejects_nodes_not_spanning(self):
        with pytest.raises(ConfigError):
            make_hat_basis([0.1, 0.5, 1.0])


class TestChecks:
    def test_bernstein_partition_passes(self):
        basis = make_bernstein_basis(5)
        result = check_partition_of_unity(basis, np.linspace(0, 1, 1001), tol=1e-12)
        assert result.passed

    def test_scaled_basis_fails_with_deviation(self):
        base = make_bernstein_basis(3)
        shrunk = BasisSystem(tuple(scaled(e, 0.9) for e in base.functions),
                             base.domain, name="shrunk")
        result = check_partition_of_unity(shrunk, np.linspace(0, 1, 101), tol=1e-12)
        assert not result.passed
        assert result.value == pytest.approx(0.1, abs=1e-12)

    def test_bspline_partition_on_interior_grid(self):
        basis = make_bspline_basis(clamped_knots([0.0, 0.4, 0.9, 1.0], 3), 3)
        result = check_partition_of_unity(basis, np.linspace(0, 1, 501), tol=1e-12)
        assert result.passed

    def test_nonnegativity_pass_and_min_zero(self):
        basis = make_hat_basis([0.0, 0.5, 1.0])
        result = check_nonnegativity(basis, np.linspace(0, 1, 101), tol=0.0)
        assert result.passed and result.value == 0.0

    def test_nonnegativity_detects_violation(self):
        bad = BasisSystem(
            (ClosedForm("2x-1", lambda xs: 2 * xs - 1), ClosedForm("2-2x", lambda xs: 2 - 2 * xs)),
            UNIT_INTERVAL, name="bad")
        result = check_nonnegativity(bad, np.linspace(0, 1, 101), tol=1e-12)
        assert not result.passed
        assert result.value == pytest.approx(-1.0)
        assert result.worst_x == 0.0

    def test_empty_grid_rejected(self):
        basis = make_bernstein_basis(2)
        with pytest.raises(ConfigError):
            check_partition_of_unity(basis, np.array([]))
        with pytest.raises(ConfigError):
            check_nonnegativity(basis, np.array([]))

    @pytest.mark.parametrize("make", [
        lambda: make_bernstein_basis(4),
        lambda: make_bernstein_basis(11),
        lambda: make_bspline_basis(clamped_knots([0.0, 0.5, 1.0], 2), 2),
        lambda: make_hat_basis([0.0, 0.2, 0.9, 1.0]),
    ])
    def test_catalog_bases_pou_and_nonneg(self, make):
        basis = make()
        grid = np.linspace(0, 1, 1000)
        assert check_partition_of_unity(basis, grid, tol=1e-12).passed
        assert basis.values(grid).min() >= 0.0
