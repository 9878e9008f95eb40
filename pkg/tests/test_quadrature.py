import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from abqed.errors import AccuracyError, DomainError
from abqed.quadrature import (QuadratureSpec, angular_average, angular_count, bessel_j,
                              gauss_legendre, neville_zero, panel_nodes, regulated_radial, vsum)


class TestBessel:
    @pytest.mark.parametrize("order", [0, 1])
    def test_against_scipy_dense_grid(self, order):
        x = np.concatenate([np.linspace(0, 40, 40001), np.geomspace(40, 5e4, 2000)])
        ref = special.jv(order, x)
        assert np.max(np.abs(bessel_j(order, x) - ref)) < 2e-14

    @pytest.mark.parametrize("x", [7.999999999, 8.0, 24.99999999, 25.0])
    def test_branch_boundaries(self, x):
        for order in (0, 1):
            assert bessel_j(order, x) == pytest.approx(special.jv(order, x), abs=2e-14)

    def test_small_argument_series_leading_terms(self):
        x = 1e-4
        assert bessel_j(0, x) == pytest.approx(1 - x * x / 4, rel=1e-16)
        assert bessel_j(1, x) == pytest.approx(x / 2 - x ** 3 / 16, rel=1e-16)

    def test_scalar_and_shape(self):
        assert isinstance(bessel_j(0, 1.0), float)
        assert bessel_j(1, np.ones((3, 2))).shape == (3, 2)

    @pytest.mark.parametrize("order,x", [(2, 1.0), (0, -1.0), (1, np.inf), (0, np.nan)])
    def test_domain(self, order, x):
        with pytest.raises(DomainError):
            bessel_j(order, x)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 200.0))
    def test_recurrence_and_derivative(self, x):
        # J0' = -J1, checked by central differences
        h = 1e-5
        fd = (bessel_j(0, x + h) - bessel_j(0, x - h)) / (2 * h)
        assert fd == pytest.approx(-bessel_j(1, x), abs=1e-9)


class TestNodeRules:
    @pytest.mark.parametrize("n", [2, 5, 12, 20])
    def test_gauss_legendre_exact_for_polynomials(self, n):
        x, w = gauss_legendre(n)
        for deg in range(2 * n):
            exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
            assert math.fsum(w * x ** deg) == pytest.approx(exact, abs=1e-14)

    def test_panel_nodes_integrate_exponential(self):
        k, w = panel_nodes(0.5, 20, 12)
        assert math.fsum(w * np.exp(-k)) == pytest.approx(1 - math.exp(-10), rel=1e-15)

    def test_angular_count_even_and_minimum(self):
        assert angular_count(0.0) == 64
        for z in (10.0, 101.3, 1234.5):
            n = angular_count(z)
            assert n % 2 == 0 and n > z

    def test_angular_average_bessel_integral(self):
        # int_0^{2pi} exp(i z cos phi) dphi = 2 pi J0(z)
        for z in (0.5, 7.0, 60.0):
            n = angular_count(z)
            got = angular_average(lambda p: np.exp(1j * z * np.cos(p)), n)
            assert abs(got - 2 * math.pi * special.j0(z)) < 1e-13

    def test_angular_average_vector_output(self):
        got = angular_average(lambda p: np.stack([np.cos(p) ** 2, np.sin(p) ** 2], -1), 64)
        np.testing.assert_allclose(got, [math.pi, math.pi], rtol=1e-15)

    def test_vsum_compensated(self):
        v = np.array([[1e16, 1.0, -1e16, 1.0]] * 3)
        np.testing.assert_array_equal(vsum(v, axis=1), [2.0, 2.0, 2.0])


class TestNeville:
    def test_exact_for_polynomial_in_h(self):
        h = [0.4, 0.3, 0.2, 0.1]
        vals = [3.0 - 2 * t + 5 * t ** 3 for t in h]
        assert neville_zero(h, vals)[-1] == pytest.approx(3.0, rel=1e-13)

    def test_diagonal_degrees(self):
        h = [1.0, 0.5]
        assert neville_zero(h, [2.0, 1.5]) == [2.0, 1.0]


class TestQuadratureSpec:
    def test_default_schedule_decreasing(self):
        s = QuadratureSpec().epsilon_schedule
        assert len(s) == 12 and all(b < a for a, b in zip(s, s[1:]))

    @pytest.mark.parametrize("kw", [{"n_angular": 63}, {"n_angular": 32}, {"n_radial": 1},
                                    {"abs_tol": 0.0}, {"epsilon_schedule": (0.1, 0.2)},
                                    {"extrapolation_order": 30}])
    def test_validation(self, kw):
        with pytest.raises(DomainError):
            QuadratureSpec(**kw)

    def test_dict_round_trip(self):
        s = QuadratureSpec(rel_tol=1e-8, n_radial=10)
        assert QuadratureSpec.from_dict(s.to_dict()) == s
        assert s.to_dict()["k_max"] == "inf"

    def test_scaled(self):
        s = QuadratureSpec().scaled(0.5)
        assert s.abs_tol == 5e-11 and s.rel_tol == 5e-11


class TestRegulatedRadial:
    @pytest.mark.parametrize("kernel", ["J1", "J0", "one_over_k2_3d"])
    @pytest.mark.parametrize("r", [0.1, 1.0, 7.3])
    def test_named_kernels_give_inverse_distance(self, kernel, r):
        res = regulated_radial(kernel, r)
        assert res.value * r == pytest.approx(1.0, abs=1e-10)
        assert abs(res.value * r - 1.0) <= res.error_estimate * r + 1e-13

    def test_error_estimate_is_honest(self):
        # the estimate must bound the true error for a few radii and tolerances
        for tol in (1e-6, 1e-9):
            spec = QuadratureSpec(abs_tol=tol, rel_tol=tol)
            for r in (0.3, 2.0):
                res = regulated_radial("J1", r, spec)
                assert abs(res.value - 1 / r) <= res.error_estimate + 1e-15

    def test_callable_closed_form(self):
        # int_0^inf exp(-k) J0(k r) dk = 1 / sqrt(1 + r^2)
        r = 0.8
        res = regulated_radial(lambda k: np.exp(-k) * bessel_j(0, k * r), r)
        assert res.value == pytest.approx(1 / math.sqrt(1 + r * r), rel=1e-11)

    def test_vector_integrand(self):
        r = 1.5
        res = regulated_radial(
            lambda k: np.stack([bessel_j(1, k * r), 2 * bessel_j(0, k * r)], -1), r)
        np.testing.assert_allclose(res.value, [1 / r, 2 / r], rtol=1e-10)

    def test_unknown_kernel(self):
        with pytest.raises(DomainError):
            regulated_radial("J2", 1.0)

    def test_non_convergence_raises(self):
        spec = QuadratureSpec(abs_tol=1e-16, rel_tol=1e-16, epsilon_schedule=(0.5, 0.4, 0.3))
        with pytest.raises(AccuracyError) as info:
            regulated_radial("J1", 1.0, spec)
        assert info.value.estimate is not None

    def test_default_fixed_order_schedule_is_coarse(self):
        # four regulators between 0.4 r and 0.05 r only reach about 1e-4
        spec = QuadratureSpec(epsilon_schedule=(0.4, 0.2, 0.1, 0.05), abs_tol=1e-2, rel_tol=1e-2)
        res = regulated_radial("J1", 1.0, spec)
        assert 1e-7 < abs(res.value - 1.0) < 1e-3
