import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abqed.core import CurrentLoop, PathGeometry, UnitSystem, circle
from abqed.errors import ConfigError, ContractError, DomainError
from abqed.modes import (GAUGE_FAMILIES, SPATIAL, TRANSVERSE, AzimuthalHarmonic, GaugeSpec,
                         GaussianBump, GradLambdaField, PhotonMode, Polarization, Polynomial,
                         chi_from_dict, grad_lambda, mode_A, mode_B, phi_hat,
                         polarization_identity_sum, random_gauge, stokes_check)

unit_angles = st.floats(0.0, 2 * math.pi)
coords = st.floats(-5.0, 5.0)


class TestPhotonMode:
    @settings(max_examples=100, deadline=None)
    @given(unit_angles, st.floats(0.01, 50.0))
    def test_orthonormal_triads(self, phi, kmag):
        k = kmag * np.array([math.cos(phi), math.sin(phi)])
        for label in TRANSVERSE:
            m = PhotonMode(k, label)
            assert np.dot(m.e_hat, m.k_hat) == pytest.approx(0.0, abs=1e-15)
            assert np.linalg.norm(m.e_hat) == pytest.approx(1.0, abs=1e-15)
            np.testing.assert_allclose(m.n_hat, np.cross(m.k_hat, m.e_hat), atol=1e-15)

    def test_in_plane_n_hat_is_z(self):
        m = PhotonMode([0.3, -1.2])
        np.testing.assert_allclose(m.n_hat, [0, 0, 1], atol=1e-15)
        assert PhotonMode([0.3, -1.2], Polarization.OUT_OF_PLANE).n_hat[2] == 0.0

    def test_longitudinal_has_no_b(self):
        m = PhotonMode([1.0, 2.0], Polarization.LONGITUDINAL)
        np.testing.assert_array_equal(m.n_hat, np.zeros(3))

    def test_alpha(self):
        u = UnitSystem(hbar=2.0, c=3.0)
        m = PhotonMode([0.0, 4.0], units=u)
        assert m.alpha == pytest.approx(math.sqrt(2 * math.pi * 2.0 * 9.0 / 12.0))

    def test_zero_wavevector(self):
        with pytest.raises(DomainError):
            PhotonMode([0.0, 0.0])

    def test_out_of_plane_k_needs_scalar(self):
        with pytest.raises(ContractError):
            PhotonMode([0.0, 0.0, 1.0])
        assert PhotonMode([0.0, 0.0, 1.0], Polarization.SCALAR).kmag == 1.0

    def test_batched_shapes(self):
        k = np.random.default_rng(0).normal(size=(4, 5, 2))
        m = PhotonMode(k)
        assert m.e_hat.shape == (4, 5, 3) and m.omega.shape == (4, 5)

    def test_time_factor(self):
        m = PhotonMode([2.0, 0.0])
        assert m.time_factor(0.0) == 1.0
        assert m.time_factor(0.5) == pytest.approx(np.exp(-1j))

    def test_field_coefficients_reject_scalar(self):
        m = PhotonMode([0.0, 0.0, 1.0], Polarization.SCALAR)
        with pytest.raises(ContractError):
            mode_A(m, (0, 0))
        with pytest.raises(ContractError):
            mode_B(m, (0, 0))


class TestModeFields:
    def test_b_is_curl_of_a_finite_difference(self):
        # z.(curl A) of the in-plane mode by central differences of Re(A)
        m = PhotonMode([1.3, -0.7])
        x0, h = np.array([0.4, 0.9]), 1e-5

        def a(x):
            return np.real(mode_A(m, x)[0])

        dAy_dx = (a(x0 + [h, 0])[1] - a(x0 - [h, 0])[1]) / (2 * h)
        dAx_dy = (a(x0 + [0, h])[0] - a(x0 - [0, h])[0]) / (2 * h)
        bz = np.real(mode_B(m, x0)[0])[2]
        assert bz == pytest.approx(dAy_dx - dAx_dy, abs=1e-9)

    def test_transverse(self):
        m = PhotonMode([0.5, 2.0])
        ann, cre = mode_A(m, (1.0, 1.0), t=0.3)
        assert abs(np.dot(ann, m.k_hat)) < 1e-15
        np.testing.assert_allclose(cre, np.conj(ann))

    def test_grad_lambda_longitudinal_and_curl_free(self):
        g = GaugeSpec("complex-isotropic", 1 + 2j, 1.0)
        k = np.array([0.8, 0.6])
        ann, cre = grad_lambda(k, g, (0.2, 0.1))
        assert np.linalg.norm(np.cross(ann, [0.8, 0.6, 0.0])) < 1e-15
        assert np.linalg.norm(np.cross(cre, [0.8, 0.6, 0.0])) < 1e-15


class TestPolarizationIdentity:
    @settings(max_examples=200, deadline=None)
    @given(unit_angles, coords, coords)
    def test_equals_azimuthal_projection(self, phi, px, py):
        k_hat = np.array([math.cos(phi), math.sin(phi)])
        p = np.array([px, py])
        got = polarization_identity_sum(k_hat, p)
        assert got == pytest.approx(float(phi_hat(k_hat)[:2] @ p), abs=1e-14)

    def test_batch(self):
        rng = np.random.default_rng(5)
        phi = rng.uniform(0, 2 * np.pi, 1000)
        k = np.column_stack([np.cos(phi), np.sin(phi)])
        p = rng.normal(size=(1000, 2))
        ref = -np.sin(phi) * p[:, 0] + np.cos(phi) * p[:, 1]
        np.testing.assert_allclose(polarization_identity_sum(k, p), ref, atol=1e-14)

    def test_zero_k(self):
        with pytest.raises(DomainError):
            polarization_identity_sum([0.0, 0.0], [1.0, 0.0])


class TestChiPrimitives:
    prims = [Polynomial(((1, 1, 1.0), (2, 0, -0.5), (0, 3, 0.2))),
             GaussianBump(0.7, (0.3, -0.2), 0.4),
             AzimuthalHarmonic(0.9, 3, (0.1, 0.2), 0.7)]

    @pytest.mark.parametrize("chi", prims)
    def test_gradient_matches_finite_differences(self, chi):
        rng = np.random.default_rng(2)
        x = rng.uniform(-1, 1, (20, 2))
        h = 1e-6
        fd = np.stack([(chi.value(x + [h, 0]) - chi.value(x - [h, 0])) / (2 * h),
                       (chi.value(x + [0, h]) - chi.value(x - [0, h])) / (2 * h)], -1)
        np.testing.assert_allclose(chi.gradient(x), fd, atol=1e-8)

    @pytest.mark.parametrize("chi", prims)
    def test_dict_round_trip(self, chi):
        again = chi_from_dict(chi.to_dict())
        x = np.array([[0.3, 0.4]])
        np.testing.assert_allclose(again.value(x), chi.value(x))

    def test_azimuthal_harmonic_polar_form(self):
        chi = AzimuthalHarmonic(2.0, 2, (0.0, 0.0), 0.5)
        r, th = 1.3, 0.4
        assert chi.value(np.array([r * math.cos(th), r * math.sin(th)])) == pytest.approx(
            2.0 * r ** 2 * math.cos(2 * th - 0.5))

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            chi_from_dict({"kind": "spline"})


class TestGaugeSpec:
    def test_family_rules(self):
        with pytest.raises(ConfigError):
            GaugeSpec("real-isotropic", 1j)
        with pytest.raises(ConfigError):
            GaugeSpec("complex-isotropic", 1.0, harmonic=2)
        with pytest.raises(ConfigError):
            GaugeSpec("anisotropic", 1.0, harmonic=0)
        with pytest.raises(ConfigError):
            GaugeSpec("radial", 1.0)

    def test_gamma(self):
        g = GaugeSpec("anisotropic", 2.0, 0.5, harmonic=2)
        assert g.gamma([0.0, 1.0]) == pytest.approx(2.0 * math.exp(-2.0) * math.cos(math.pi))

    def test_round_trip(self):
        g = GaugeSpec("complex-isotropic", 1 - 0.5j, 0.8, chi=(GaussianBump(1.0, (0, 0), 1.0),))
        d = g.to_dict()
        assert d["amplitude"] == [1.0, -0.5]
        assert GaugeSpec.from_dict(d) == g

    @pytest.mark.parametrize("family", GAUGE_FAMILIES)
    def test_random_gauge_is_seeded(self, family):
        a = random_gauge(np.random.default_rng(11), family)
        b = random_gauge(np.random.default_rng(11), family)
        assert a == b and a.family == family and 0.5 <= a.width <= 1.5


class TestStokes:
    def _loop(self):
        return CurrentLoop(1.5, PathGeometry([[0.1, -0.8], [1.2, 0.1], [0.3, 1.0], [-0.9, 0.4],
                                              [-0.6, -0.7]], closed=True))

    def test_second_order_convergence(self):
        m = PhotonMode([1.1, 0.9])
        errs = [stokes_check(m, self._loop(), h).rel_error for h in (0.04, 0.02, 0.01)]
        orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
        assert all(1.9 < q < 2.1 for q in orders)

    def test_surface_integral_exact_for_known_mode(self):
        # circulation of Re(A) around a small square approaches B_z * area
        m = PhotonMode([0.7, -0.4])
        sq = CurrentLoop(1.0, PathGeometry([[0, 0], [1e-2, 0], [1e-2, 1e-2], [0, 1e-2]],
                                           closed=True))
        res = stokes_check(m, sq, 1e-4)
        bz = np.real(mode_B(m, [5e-3, 5e-3])[0])[2]
        assert res.surface_integral == pytest.approx(bz * 1e-4, rel=1e-4)

    def test_gradient_field_has_zero_circulation(self):
        g = GaugeSpec("complex-isotropic", 1 + 1j, 1.0)
        res = stokes_check(GradLambdaField(np.array([1.5, -0.5]), g), self._loop(), 0.005)
        assert res.surface_integral == 0.0
        assert abs(res.line_integral) < 1e-5 and res.rel_error < 1e-5

    def test_fluxon_energy_sign(self):
        m = PhotonMode([0.5, 0.5])
        res = stokes_check(m, CurrentLoop(2.0, circle(0.5, n=30)), 0.01, UnitSystem(c=2.0))
        assert res.vb_line == pytest.approx(-(2.0 / 2.0) * res.line_integral)

    def test_contract(self):
        with pytest.raises(ContractError):
            stokes_check(PhotonMode(np.ones((2, 2))), self._loop(), 0.1)
        with pytest.raises(ContractError):
            stokes_check("mode", self._loop(), 0.1)

    def test_spatial_labels(self):
        assert Polarization.LONGITUDINAL in SPATIAL and not Polarization.LONGITUDINAL.transverse
