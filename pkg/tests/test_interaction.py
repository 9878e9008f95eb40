import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from abqed import interaction as ia
from abqed.core import ChargeFluxConfig, UnitSystem
from abqed.errors import ContractError, SingularityError
from abqed.interaction import (ChargeDistribution, analytic_a, coulomb_energy,
                               coulomb_gauge_comparison, coulomb_kernel, delta_a, effective_a,
                               effective_a_theta, h2_assemble, h2_direct, me_delta_va, me_scalar,
                               me_va, me_vb, pair_energy)
from abqed.modes import TRANSVERSE, GaugeSpec, PhotonMode, Polarization
from abqed.quadrature import QuadratureSpec, bessel_j

CFG = ChargeFluxConfig()


def _angular_fourier(n, sigma, z, psi):
    # int_0^{2pi} cos(n phi) exp(i z cos(phi - psi)) exp(i sigma phi) dphi by Jacobi-Anger
    total = 0j
    for q in (n + sigma, sigma - n):
        m = -q
        total += 1j ** m * special.jv(m, z) * np.exp(-1j * m * psi)
    return math.pi * total


def delta_a_oracle(x, gauge, Phi=2 * math.pi):
    """Continuum gauge-variation field by adaptive quadrature in k (hbar = c = 1).

    da(x) = (Phi/2pi) sqrt(2pi) int d^2k/(2pi)^2 k^(1/2) Re[gamma(k) exp(ik.x)] k_hat
    """
    r = math.hypot(*x)
    psi = math.atan2(x[1], x[0])
    n = gauge.harmonic

    def comp(k, which):
        ep, em = _angular_fourier(n, 1, k * r, psi), _angular_fourier(n, -1, k * r, psi)
        v = (ep + em) / 2 if which == 0 else (ep - em) / 2j
        return k ** 1.5 * np.real(gauge.amplitude * np.exp(-k / gauge.width) * v)

    out = [integrate.quad(comp, 0, 60 * gauge.width, args=(w,), limit=400,
                          epsabs=1e-14, epsrel=1e-13)[0] for w in (0, 1)]
    return (Phi / (2 * math.pi)) * math.sqrt(2 * math.pi) * np.array(out) / (2 * math.pi) ** 2


class TestMatrixElements:
    def test_va_contracts_p_with_polarization(self):
        m = PhotonMode([0.6, 0.8])
        p = np.array([1.5, -0.3])
        el = me_va(m, p, (0.2, 0.1), CFG)
        assert el.amplitude == pytest.approx(el.coefficient * (m.e_hat[:2] @ p))
        assert el.time_phase_sign == -1

    def test_va_rejects_longitudinal(self):
        with pytest.raises(ContractError):
            me_va(PhotonMode([1.0, 0.0], Polarization.LONGITUDINAL), (1, 0), (0, 0), CFG)

    def test_vb_decouples_out_of_plane(self):
        el = me_vb(PhotonMode([1.0, 2.0], Polarization.OUT_OF_PLANE), (0, 0), CFG)
        assert el.amplitude == 0

    def test_vb_rejects_scalar(self):
        with pytest.raises(ContractError):
            me_vb(PhotonMode([0, 0, 1.0], Polarization.SCALAR), (0, 0), CFG)

    def test_adjoint_flips_time_phase(self):
        el = me_vb(PhotonMode([1.0, 2.0]), (0.3, 0), CFG, t=0.4)
        adj = el.adjoint()
        assert adj.time_phase_sign == -el.time_phase_sign
        assert adj.amplitude == pytest.approx(np.conj(el.amplitude))

    def test_pair_needs_opposite_phases(self):
        m = PhotonMode([1.0, 2.0])
        el = me_vb(m, (0, 0), CFG)
        with pytest.raises(ContractError):
            pair_energy(el, el, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.1, 20), st.floats(0, 2 * math.pi), st.floats(0, 3.0),
           st.floats(-2, 2), st.floats(-2, 2))
    def test_hermitian_pairing(self, kmag, phi, t, px, py):
        m = PhotonMode(kmag * np.array([math.cos(phi), math.sin(phi)]))
        left = me_va(m, (px, py), (0.4, -1.0), CFG, t)
        right = me_vb(m, (0.1, 0.2), CFG, t)
        forward = left.amplitude * right.amplitude
        backward = right.adjoint().amplitude * left.adjoint().amplitude
        assert backward == pytest.approx(np.conj(forward), abs=1e-15)
        e = pair_energy(left, right, 1.0)
        assert abs(np.imag(e)) <= 1e-12 * max(1.0, abs(e))

    def test_delta_va_is_longitudinal(self):
        g = GaugeSpec("real-isotropic", 1.0, 1.0)
        el = me_delta_va(np.array([0.3, 0.4]), g, (1.0, 0.0), (0, 0), CFG)
        np.testing.assert_allclose(el.coupling_vector, [0.6, 0.8, 0.0])

    def test_scalar_element(self):
        m = PhotonMode([0, 0, 2.0], Polarization.SCALAR)
        el = me_scalar(m, 3.0, (0, 0, 0))
        assert el.amplitude == pytest.approx(3.0 * m.alpha)


class TestAngularReduction:
    @pytest.mark.parametrize("k", [0.3, 2.0, 11.0])
    def test_transverse_angular_sum_equals_bessel_form(self, k):
        # literal angular sum of the pair p-gradient versus profile * J1(kr) * theta_hat
        x = np.array([0.7, -0.4])
        r = math.hypot(*x)
        direct = ia._direct_profile(np.array([k]), x, CFG, UnitSystem(), 0.0, 1.0, CFG.x_b)[0]
        factored = ia._a_profile(np.array([k]), CFG, UnitSystem(), 1.0)[0] * bessel_j(1, k * r)
        theta_hat = np.array([-x[1], x[0]]) / r
        np.testing.assert_allclose(-direct, factored * theta_hat, atol=1e-14, rtol=1e-12)


class TestEffectiveA:
    @pytest.mark.parametrize("r", [0.1, 0.35, 1.0, 4.0, 10.0])
    def test_matches_azimuthal_potential(self, r):
        res = effective_a((r * 0.6, r * 0.8), CFG)
        exact = analytic_a((r * 0.6, r * 0.8), CFG.Phi)
        err = np.linalg.norm(res.value - exact)
        assert err <= 1e-10 * np.linalg.norm(exact)
        assert err <= res.error_estimate
        assert res.extras["a_r"] == 0.0

    def test_independent_of_charge_mass_units_and_volume(self):
        x = (0.3, 1.2)
        base = effective_a(x, CFG).value
        cfg = ChargeFluxConfig(e=0.3, m=7.0, M=4.0)
        for spec, units in [(QuadratureSpec(volume=13.0), UnitSystem()),
                            (QuadratureSpec(), UnitSystem(hbar=0.5, c=3.0))]:
            np.testing.assert_allclose(effective_a(x, cfg, spec, units).value, base, rtol=1e-10)

    def test_linear_in_flux(self):
        x = (1.0, -1.0)
        a1 = effective_a(x, CFG).value
        a3 = effective_a(x, ChargeFluxConfig(Phi=3 * CFG.Phi)).value
        np.testing.assert_allclose(a3, 3 * a1, rtol=1e-10)

    def test_antisymmetric_under_role_exchange(self):
        # exchanging the coupling points negates the relative coordinate
        x = np.array([0.8, 0.5])
        np.testing.assert_allclose(effective_a(-x, CFG).value, -effective_a(x, CFG).value,
                                   rtol=1e-12)

    def test_batched_theta_component(self):
        r = np.array([0.2, 1.0, 3.0])
        a, err = effective_a_theta(r, CFG)
        single = [effective_a((v, 0.0), CFG).extras["a_theta"] for v in r]
        np.testing.assert_allclose(a, single, rtol=1e-10)
        assert np.all(np.abs(a - 1 / r) <= err)

    def test_direct_route_radial_component(self):
        # the literal mode sum has no built-in azimuthal structure
        x = np.array([0.6, 0.8])
        spec = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-7)
        res = ia.effective_a_direct(x, CFG, spec)
        assert abs(res.value @ x) <= 1e-6
        np.testing.assert_allclose(res.value, analytic_a(x, CFG.Phi), atol=1e-6)

    def test_singularity(self):
        with pytest.raises(SingularityError):
            effective_a((1e-4, 0.0), CFG)

    def test_halving_tolerance_moves_less_than_estimate(self):
        x = (0.9, 0.2)
        a = effective_a(x, CFG)
        b = effective_a(x, CFG, CFG_SPEC_HALF)
        assert np.linalg.norm(a.value - b.value) < a.error_estimate

    def test_with_gauge_adds_delta(self):
        g = GaugeSpec("complex-isotropic", 1 + 1j, 1.0)
        x = (0.6, 0.8)
        res = effective_a(x, CFG, gauge=g)
        np.testing.assert_allclose(res.value - effective_a(x, CFG).value,
                                   res.extras["delta_a"], atol=1e-15)


CFG_SPEC_HALF = QuadratureSpec().scaled(0.5)


class TestH2:
    p = np.array([0.3, -1.1])
    x = np.array([0.7, 0.4])

    def test_factored_form(self):
        res = h2_assemble(self.p, self.x, CFG)
        a = analytic_a(self.x, CFG.Phi)
        assert res.value == pytest.approx(-(CFG.e / CFG.m) * (self.p @ a), rel=1e-10)

    def test_time_independent(self):
        vals = [h2_assemble(self.p, self.x, CFG, t=t).value for t in (0.0, 0.37, 2.0)]
        assert max(vals) - min(vals) <= 1e-12 * abs(vals[0])

    def test_direct_mode_sum_agrees(self):
        spec = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-9)
        direct = h2_direct(self.p, self.x, CFG, spec)
        factored = h2_assemble(self.p, self.x, CFG)
        assert direct.value == pytest.approx(factored.value, rel=1e-7)
        assert abs(direct.value - factored.value) <= direct.error_estimate + factored.error_estimate

    def test_direct_is_translation_invariant(self):
        spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-8)
        moved = ChargeFluxConfig(x_b=(3.0, -2.0))
        a = h2_direct(self.p, self.x, CFG, spec).value
        b = h2_direct(self.p, self.x, moved, spec).value
        assert a == pytest.approx(b, rel=1e-6)

    def test_zero_momentum(self):
        assert h2_direct((0.0, 0.0), self.x, CFG).value == 0.0


class TestDeltaA:
    @pytest.mark.parametrize("amp,width", [(1.0, 1.0), (-1.7, 0.6), (0.4, 1.4)])
    def test_real_isotropic_vanishes_within_estimate(self, amp, width):
        g = GaugeSpec("real-isotropic", amp, width)
        for x in [(0.6, 0.8), (-1.2, 0.3), (0.1, -0.5)]:
            d = delta_a(x, g, CFG)
            assert np.linalg.norm(d.value) <= 10 * d.error_estimate
            assert d.error_estimate < 1e-14

    @pytest.mark.parametrize("gauge,x", [
        (GaugeSpec("complex-isotropic", 1 + 1j, 1.0), (0.6, 0.8)),
        (GaugeSpec("complex-isotropic", 0.3 - 0.9j, 0.7), (-1.1, 0.2)),
        (GaugeSpec("anisotropic", 1.0, 1.0, harmonic=1), (0.6, -0.5)),
        (GaugeSpec("anisotropic", 0.5 - 1j, 0.7, harmonic=2), (0.6, -0.5)),
    ])
    def test_nonvanishing_families_match_continuum_oracle(self, gauge, x):
        d = delta_a(x, gauge, CFG)
        ref = delta_a_oracle(x, gauge)
        assert np.linalg.norm(ref) > 1e-3
        assert np.linalg.norm(d.value - ref) <= d.error_estimate

    def test_complex_isotropic_closed_form(self):
        # radial: -(Phi/2pi) sqrt(2pi) Im(A) (1/2pi) int k^1.5 e^{-k/w} J1(kr) dk r_hat
        g = GaugeSpec("complex-isotropic", 1 + 1j, 1.0)
        radial = 0.17028482611069484
        d = delta_a((0.6, 0.8), g, CFG)
        np.testing.assert_allclose(d.value, -radial * np.array([0.6, 0.8]), rtol=1e-5)

    def test_zero_amplitude_exact(self):
        d = delta_a((1.0, 0.0), GaugeSpec("real-isotropic", 0.0), CFG)
        assert d.error_estimate == 0.0 and not np.any(d.value)

    def test_per_polarization_components(self):
        d = delta_a((0.6, 0.8), GaugeSpec("complex-isotropic", 1j, 1.0), CFG)
        comps = d.extras["components"]
        assert comps["out-of-plane-transverse"] == [0.0, 0.0]
        assert comps["longitudinal"] == [0.0, 0.0]
        np.testing.assert_allclose(comps["in-plane-transverse"], d.value)

    def test_scalar_shift_is_diagnostic_only(self):
        g = GaugeSpec("complex-isotropic", 1 + 1j, 1.0)
        off = delta_a((0.6, 0.8), g, CFG)
        on = delta_a((0.6, 0.8), g, CFG, include_scalar_shift=True)
        assert "scalar_shift" not in off.extras
        np.testing.assert_array_equal(off.value, on.value)
        assert math.isfinite(on.extras["scalar_shift"])

    def test_field_is_curl_free(self):
        f = ia.GaugeVariationField(GaugeSpec("anisotropic", 1.0, 1.0, harmonic=1), CFG, 1.5)
        x0, h = np.array([0.5, 0.7]), 1e-5
        dfy_dx = (f(x0 + [h, 0])[1] - f(x0 - [h, 0])[1]) / (2 * h)
        dfx_dy = (f(x0 + [0, h])[0] - f(x0 - [0, h])[0]) / (2 * h)
        assert abs(dfy_dx - dfx_dy) < 1e-8


class TestCoulomb:
    @pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
    def test_inverse_distance(self, r):
        res = coulomb_kernel(r)
        assert res.value * r == pytest.approx(1.0, abs=1e-10)

    def test_indefinite_metric_sign(self, monkeypatch):
        monkeypatch.setattr(ia, "SCALAR_METRIC", 1.0)
        assert coulomb_kernel(1.0).value == pytest.approx(-1.0, abs=1e-10)

    def test_energy_superposition(self):
        rho = ChargeDistribution(((1.0, (1.0, 0.0)), (-2.0, (0.0, 0.0, 2.0))))
        res = coulomb_energy(0.5, (0.0, 0.0), rho)
        assert res.value == pytest.approx(0.5 * (1.0 / 1.0 - 2.0 / 2.0), abs=1e-10)
        with pytest.raises(SingularityError):
            coulomb_energy(1.0, (1.0, 0.0), rho)

    def test_gauge_comparison(self):
        out = coulomb_gauge_comparison(2.0)
        assert out["coulomb_gauge_kernel"] == 0.0
        assert out["difference"] == pytest.approx(0.5, abs=1e-10)

    def test_transverse_labels_are_two(self):
        assert len(TRANSVERSE) == 2
