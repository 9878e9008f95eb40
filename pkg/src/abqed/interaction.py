"""Second-order (one-virtual-photon) interaction between a charge and a fluxon.

The effective coupling is the mode sum

    H2 = sum_gamma [<0|V_a|g><g|V_b|0> + h.c.] / (-hbar omega)

over one-photon intermediate states.  In the continuum limit
sum_k -> V/(2pi)^d int d^dk, the box volume V cancels against the two
1/sqrt(V) factors of the mode functions.

Two routes evaluate it:

* ``effective_a``: the sum over transverse polarizations collapses to
  phi_hat(k).p, the angular integral to 2 pi i J1(kr) theta_hat, leaving a
  regulated radial J1 integral.
* ``h2_direct``: the literal sum over a polar k-grid, both transverse
  polarizations and both orderings, nothing done analytically.

``h2_assemble`` uses the first route and is checked against the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ChargeFluxConfig, UnitSystem
from .errors import ContractError, DomainError, SingularityError
from .modes import (SPATIAL, TRANSVERSE, GaugeSpec, PhotonMode, Polarization, embed)
from .quadrature import (EPS, QuadratureSpec, angular_count, angular_nodes, bessel_j, fsum,
                         panel_nodes, regulated_radial)

# Sign of <g|g> for scalar photons (indefinite metric).
SCALAR_METRIC = -1.0


@dataclass(frozen=True)
class MatrixElement:
    """One-photon matrix element ``amplitude = coefficient * (coupling_vector . p)``.

    ``time_phase_sign`` is -1 for exp(-i w t) (photon absorbed on the
    right, <0|X|g>) and +1 for exp(+i w t) (<g|X|0>).  Couplings that do
    not involve p carry a zero coupling vector and ``coefficient`` equal
    to the amplitude.
    """

    amplitude: complex | np.ndarray
    time_phase_sign: int
    mode: PhotonMode
    coupling_vector: np.ndarray
    coefficient: complex | np.ndarray

    def adjoint(self) -> "MatrixElement":
        """Matrix element of the reversed transition for a Hermitian operator (real p)."""
        return MatrixElement(np.conj(self.amplitude), -self.time_phase_sign, self.mode,
                             self.coupling_vector, np.conj(self.coefficient))


@dataclass(frozen=True)
class EffectiveFieldResult:
    value: np.ndarray | float
    error_estimate: float
    spec_echo: QuadratureSpec
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ChargeDistribution:
    """External point charges ((q, (x, y, z)), ...)."""

    point_charges: tuple

    def __post_init__(self):
        pcs = tuple((float(q), tuple(float(c) for c in embed(pos)))
                    for q, pos in self.point_charges)
        object.__setattr__(self, "point_charges", pcs)


# ---------------------------------------------------------------------------
# matrix elements

def _p3(p, shape):
    return np.broadcast_to(embed(p), shape)


def me_va(mode: PhotonMode, p, x_a, cfg: ChargeFluxConfig, t: float = 0.0,
          volume: float = 1.0) -> MatrixElement:
    """<0|V_a|g> with V_a = -(e/mc) A.p for a transverse photon."""
    if not mode.label.transverse:
        raise ContractError(f"me_va needs a transverse mode, got {mode.label.value}; "
                            "use me_delta_va for the gauge part")
    c = mode.units.c
    coeff = -(cfg.e / (cfg.m * c)) * mode.alpha * mode.u(x_a, volume) * mode.time_factor(t)
    e_hat = mode.e_hat
    amp = coeff * np.sum(e_hat * _p3(p, e_hat.shape), axis=-1)
    return MatrixElement(amp, -1, mode, e_hat, coeff)


def me_vb(mode: PhotonMode, x_b, cfg: ChargeFluxConfig, t: float = 0.0,
          volume: float = 1.0) -> MatrixElement:
    """<g|V_b|0> with V_b = -(Phi/4pi) z.B."""
    if mode.label is Polarization.SCALAR:
        raise ContractError("the fluxon couples to B, which has no scalar-mode part")
    phase = np.conj(mode.u(x_b, volume) * mode.time_factor(t))
    amp = 1j * (cfg.Phi / (4.0 * math.pi)) * mode.kmag * mode.alpha * phase * mode.n_hat[..., 2]
    return MatrixElement(amp, +1, mode, np.zeros(np.shape(mode.k3)), amp)


def me_delta_va(k, gauge: GaugeSpec, p, x_a, cfg: ChargeFluxConfig, t: float = 0.0,
                volume: float = 1.0, units: UnitSystem | None = None) -> MatrixElement:
    """<0|dV_a|g> for dV_a = -(e/mc) grad(Lambda).p; longitudinal coupling along k_hat."""
    mode = PhotonMode(k, Polarization.LONGITUDINAL, units or UnitSystem())
    c = mode.units.c
    coeff = (-1j * cfg.e / (cfg.m * c)) * mode.kmag * gauge.gamma(mode.k) \
        * mode.u(x_a, volume) * mode.time_factor(t)
    k_hat = mode.k_hat
    amp = coeff * np.sum(k_hat * _p3(p, k_hat.shape), axis=-1)
    return MatrixElement(amp, -1, mode, k_hat, coeff)


def me_scalar(mode: PhotonMode, charge: float, x, t: float = 0.0,
              volume: float = 1.0) -> MatrixElement:
    """<0|q A0(x)|g> for a scalar photon."""
    if mode.label is not Polarization.SCALAR:
        raise ContractError("me_scalar needs a scalar mode")
    amp = charge * mode.alpha * mode.u(x, volume) * mode.time_factor(t)
    return MatrixElement(amp, -1, mode, np.zeros(np.shape(mode.k3)), amp)


def pair_energy(left: MatrixElement, right: MatrixElement, hbar: float):
    """[<0|X|g><g|Y|0> + h.c.] / (-hbar w) for each mode."""
    if left.time_phase_sign + right.time_phase_sign != 0:
        raise ContractError("paired matrix elements must carry opposite time phases")
    omega = left.mode.omega
    forward = left.amplitude * right.amplitude
    backward = right.adjoint().amplitude * left.adjoint().amplitude
    return (forward + backward) / (-hbar * omega)


def pair_coefficient(left: MatrixElement, right: MatrixElement, hbar: float):
    """``pair_energy`` with the left element's p-contraction stripped off."""
    if left.time_phase_sign + right.time_phase_sign != 0:
        raise ContractError("paired matrix elements must carry opposite time phases")
    omega = left.mode.omega
    forward = left.coefficient * right.amplitude
    backward = right.adjoint().amplitude * left.adjoint().coefficient
    return (forward + backward) / (-hbar * omega)


def pair_vector(left: MatrixElement, right: MatrixElement, hbar: float):
    """p-gradient of ``pair_energy``: the vector contracting p in each mode term."""
    return pair_coefficient(left, right, hbar)[..., None] * left.coupling_vector


# ---------------------------------------------------------------------------
# effective vector potential

def _polar(x):
    x = np.asarray(x, dtype=float)
    r = float(np.hypot(x[0], x[1]))
    r_hat = x / r if r > 0 else np.array([1.0, 0.0])
    theta_hat = np.array([-r_hat[1], r_hat[0]])
    return r, r_hat, theta_hat


def _check_radius(r: float, spec: QuadratureSpec):
    if not r >= spec.r_min:
        raise SingularityError(f"|x| = {r!r} is below r_min = {spec.r_min!r}")


def _a_profile(k, cfg: ChargeFluxConfig, units: UnitSystem, volume: float, t: float = 0.0):
    """Radial integrand (without J1) of the azimuthal effective potential.

    Per mode the charge-side coefficient is c_a (e_hat.p) and the
    fluxon-side amplitude c_b (z.n_hat); summed over transverse
    polarizations this is c_a c_b (phi_hat.p), and the angular integral
    of exp(ik.x) phi_hat is 2 pi i J1(kr) theta_hat.
    """
    k = np.asarray(k, dtype=float)
    mode = PhotonMode(np.stack([k, np.zeros_like(k)], axis=-1), Polarization.IN_PLANE, units)
    c_a = me_va(mode, (0.0, 0.0), (0.0, 0.0), cfg, t, volume).coefficient
    vb = me_vb(mode, (0.0, 0.0), cfg, t, volume)
    c_b = vb.amplitude / mode.n_hat[..., 2]
    measure = volume / (2.0 * math.pi) ** 2 * k
    term = c_a * c_b * (2j * math.pi)
    h2_coeff = measure * 2.0 * np.real(term) / (-units.hbar * mode.omega)
    # H2 = -(e/mc) p.a
    return -(cfg.m * units.c / cfg.e) * h2_coeff


def effective_a(x, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
                units: UnitSystem | None = None, gauge: GaugeSpec | None = None,
                t: float = 0.0) -> EffectiveFieldResult:
    """Effective vector potential a(x) at relative position x = x_a - x_b.

    With ``gauge`` given the gauge-variation field from ``delta_a`` is
    added and its error estimate combined.
    """
    spec = spec or QuadratureSpec()
    units = units or UnitSystem()
    r, _, theta_hat = _polar(x)
    _check_radius(r, spec)

    def integrand(k):
        return _a_profile(k, cfg, units, spec.volume, t) * bessel_j(1, k * r)

    rad = regulated_radial(integrand, r, spec)
    value = rad.value * theta_hat
    err = rad.error_estimate
    extras = {"a_theta": rad.value, "a_r": 0.0, "n_regulators": len(rad.epsilons)}
    if gauge is not None:
        da = delta_a(x, gauge, cfg, spec, units, t=t)
        value = value + da.value
        err = err + da.error_estimate
        extras["delta_a"] = da.value
    return EffectiveFieldResult(value, err, spec, extras)


def effective_a_theta(r, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
                      units: UnitSystem | None = None, t: float = 0.0):
    """Azimuthal component a_theta at many distances in one regulated integral.

    In the variable u = k r the nodes, panels and regulators are the same
    for every r, so the integrand r a_theta = int profile(u / r) J1(u) du is
    evaluated as one vector-valued radial integral.  Returns (a_theta,
    error_estimate) arrays; the estimate is shared, scaled by 1/r.
    """
    spec = spec or QuadratureSpec()
    units = units or UnitSystem()
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if r.ndim != 1:
        raise DomainError("distances must be a 1-d array")
    for ri in r:
        _check_radius(float(ri), spec)

    def integrand(u):
        return _a_profile(u[:, None] / r[None, :], cfg, units, spec.volume, t) \
            * bessel_j(1, u)[:, None]

    rad = regulated_radial(integrand, 1.0, spec)
    return np.asarray(rad.value) / r, rad.error_estimate / r


def analytic_a(x, Phi: float, fluxon=(0.0, 0.0)) -> np.ndarray:
    """Phi theta_hat / (2 pi |x - fluxon|) for points of shape (..., 2)."""
    d = np.asarray(x, dtype=float) - np.asarray(fluxon, dtype=float)
    r2 = np.sum(d * d, axis=-1)
    return (Phi / (2.0 * math.pi)) * np.stack([-d[..., 1], d[..., 0]], axis=-1) / r2[..., None]


def h2_assemble(p, x, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
                units: UnitSystem | None = None, t: float = 0.0) -> EffectiveFieldResult:
    """-(e/mc) p . a(x) from the factored route."""
    units = units or UnitSystem()
    a = effective_a(x, cfg, spec, units, t=t)
    pref = -cfg.e / (cfg.m * units.c)
    p = np.asarray(p, dtype=float)
    value = pref * float(np.dot(p, a.value))
    return EffectiveFieldResult(value, abs(pref) * float(np.hypot(*p)) * a.error_estimate,
                                a.spec_echo)


def _direct_profile(k, x_rel, cfg, units, t, volume, x_b, p=None):
    """Angular mode sum of the second-order pair term at radii ``k`` (literal route).

    With ``p`` given returns the energy profile, shape (n,); without it the
    p-gradient, shape (n, 2).
    """
    k = np.asarray(k, dtype=float)
    r = float(np.hypot(*x_rel))
    x_a = np.asarray(x_b, dtype=float) + np.asarray(x_rel, dtype=float)
    out = np.empty(len(k)) if p is not None else np.empty((len(k), 2))
    counts = np.array([angular_count(kk * r) for kk in k])
    # group radial nodes sharing an angular node count (rounded up to 32)
    counts = 32 * np.ceil(counts / 32).astype(int)
    for n in np.unique(counts):
        idx = np.nonzero(counts == n)[0]
        phi = angular_nodes(int(n))
        step = max(1, 1_000_000 // int(n))
        for s in range(0, len(idx), step):
            sel = idx[s:s + step]
            kk = k[sel][:, None]
            kvec = np.stack([kk * np.cos(phi), kk * np.sin(phi)], axis=-1)
            total = 0.0
            for label in TRANSVERSE:
                mode = PhotonMode(kvec, label, units)
                left = me_va(mode, (0.0, 0.0) if p is None else p, x_a, cfg, t, volume)
                right = me_vb(mode, x_b, cfg, t, volume)
                if p is None:
                    total = total + pair_vector(left, right, units.hbar)[..., :2]
                else:
                    total = total + pair_energy(left, right, units.hbar)
            ang = (2.0 * math.pi / n) * np.sum(total, axis=1)
            scale = (volume / (2.0 * math.pi) ** 2) * k[sel]
            out[sel] = np.real(ang) * (scale if p is not None else scale[:, None])
    return out


def h2_direct(p, x, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
              units: UnitSystem | None = None, t: float = 0.0) -> EffectiveFieldResult:
    """Second-order energy for momentum ``p`` from the literal polar-grid mode sum.

    The fluxon sits at ``cfg.x_b`` and the charge at ``cfg.x_b + x``.
    """
    spec = spec or QuadratureSpec()
    units = units or UnitSystem()
    r, _, _ = _polar(x)
    _check_radius(r, spec)
    p = np.asarray(p, dtype=float)
    if not np.any(p):
        return EffectiveFieldResult(0.0, 0.0, spec)

    def integrand(k):
        return _direct_profile(k, x, cfg, units, t, spec.volume, cfg.x_b, p)

    rad = regulated_radial(integrand, r, spec)
    return EffectiveFieldResult(rad.value, rad.error_estimate, spec,
                                {"n_regulators": len(rad.epsilons)})


def effective_a_direct(x, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
                       units: UnitSystem | None = None, t: float = 0.0) -> EffectiveFieldResult:
    """a(x) from the literal mode sum of the p-gradient of each pair term."""
    spec = spec or QuadratureSpec()
    units = units or UnitSystem()
    r, _, _ = _polar(x)
    _check_radius(r, spec)
    pref = -cfg.m * units.c / cfg.e

    def integrand(k):
        return pref * _direct_profile(k, x, cfg, units, t, spec.volume, cfg.x_b)

    rad = regulated_radial(integrand, r, spec)
    return EffectiveFieldResult(np.asarray(rad.value), rad.error_estimate, spec,
                                {"n_regulators": len(rad.epsilons)})


# ---------------------------------------------------------------------------
# gauge variation

# the gauge integrand grows like k**1.5 against exp(-k/width); beyond
# GAUGE_TAIL widths it is below 1e-17 of its peak
GAUGE_TAIL = 45.0
# modes x points processed per vectorised pass
_BATCH = 1_500_000


class GaugeVariationField:
    """Cross-term field da(x) between the gauge part of V_a and V_b.

    The k-grid (radial Gauss-Legendre panels times an angular trapezoid
    resolving |k| r_max) and the paired matrix elements are built once,
    with the charge at the fluxon.  Displacing the charge by x multiplies
    the forward ordering by exp(ik.x) and the backward one by exp(-ik.x),
    so evaluation reduces to cos/sin of k.x against fixed per-mode weights.
    Every finite-grid approximation is a sum of plane-wave gradients, so
    the numerical field is curl-free exactly, not only in the limit.
    """

    def __init__(self, gauge: GaugeSpec, cfg: ChargeFluxConfig, r_max: float,
                 spec: QuadratureSpec | None = None, units: UnitSystem | None = None,
                 t: float = 0.0, n_radial: int | None = None):
        self.gauge, self.cfg = gauge, cfg
        self.spec = spec or QuadratureSpec()
        self.units = units or UnitSystem()
        self.t = t
        self.r_max = r_max
        k_end = GAUGE_TAIL * gauge.width
        # half an oscillation period at r_max, or three envelope widths
        width = min(math.pi / max(r_max, 1e-300), 3.0 * gauge.width)
        n_panels = int(math.ceil(k_end / width))
        k, wk = panel_nodes(k_end / n_panels, n_panels, n_radial or self.spec.n_radial)
        n = angular_count(k_end * r_max, self.spec.n_angular, gauge.harmonic)
        phi = angular_nodes(n)
        self.kvec = np.stack([k[:, None] * np.cos(phi), k[:, None] * np.sin(phi)],
                             axis=-1).reshape(-1, 2)
        # radial weight x Jacobian x angular weight x continuum measure
        self.weight = np.repeat(wk * k, n) * (2.0 * math.pi / n) \
            * (self.spec.volume / (2.0 * math.pi) ** 2)
        self.right = {lab: me_vb(PhotonMode(self.kvec, lab, self.units), self.cfg.x_b, cfg,
                                 t, self.spec.volume) for lab in SPATIAL}
        self.n_modes = len(self.kvec)
        self.left = me_delta_va(self.kvec, gauge, (0.0, 0.0), cfg.x_b, cfg, t,
                                self.spec.volume, self.units)
        self._coeffs = {lab: self._split(right) for lab, right in self.right.items()}

    def _split(self, right: MatrixElement):
        """cos/sin weight vectors (M, 2) of one polarization, or None if it decouples."""
        if not np.any(right.amplitude):
            # z.n_hat = 0: the fluxon does not couple to this polarization
            return None
        left = self.left
        denom = -self.units.hbar * left.mode.omega
        forward = left.coefficient * right.amplitude / denom
        backward = right.adjoint().amplitude * left.adjoint().coefficient / denom
        pref = -(self.cfg.m * self.units.c / self.cfg.e) * self.weight
        # Re(F e^{i th} + B e^{-i th}) = (F_r + B_r) cos th + (B_i - F_i) sin th
        k_hat = left.coupling_vector[:, :2]
        w_cos = (pref * (forward.real + backward.real))[:, None] * k_hat
        w_sin = (pref * (backward.imag - forward.imag))[:, None] * k_hat
        bound = float(np.sum(np.abs(w_cos) + np.abs(w_sin)))
        return w_cos, w_sin, bound

    def contributions(self, x):
        """Per-polarization field vectors at points x (..., 2) and a bound on sum|terms|."""
        x = np.asarray(x, dtype=float)
        pts = x.reshape(-1, 2)
        out = {lab.value: np.zeros((len(pts), 2)) for lab in self.right}
        mag = 0.0
        step = max(1, _BATCH // self.n_modes)
        for s in range(0, len(pts), step):
            theta = pts[s:s + step] @ self.kvec.T
            c, sn = np.cos(theta), np.sin(theta)
            for lab, co in self._coeffs.items():
                if co is None:
                    continue
                # matrix products sum over modes in a fixed order
                out[lab.value][s:s + step] = c @ co[0] + sn @ co[1]
        for co in self._coeffs.values():
            if co is not None:
                mag += co[2]
        shape = x.shape
        return ({k: v.reshape(shape) for k, v in out.items()},
                np.full(shape[:-1], mag))

    def scalar_shift(self, x) -> float:
        """Energy from the scalar-potential part (1/c) dLambda/dt of the gauge shift.

        It multiplies the charge, not p, and so is excluded from da.
        """
        x_a = np.asarray(self.cfg.x_b) + np.asarray(x, dtype=float)
        mode = PhotonMode(self.kvec, Polarization.LONGITUDINAL, self.units)
        coeff = self.cfg.e * (-1j * mode.omega / self.units.c) * self.gauge.gamma(self.kvec) \
            * mode.u(x_a, self.spec.volume) * mode.time_factor(self.t)
        left = MatrixElement(coeff, -1, mode, np.zeros(self.kvec.shape[:-1] + (3,)), coeff)
        total = 0.0
        for right in self.right.values():
            total += fsum(self.weight * np.real(pair_energy(left, right, self.units.hbar)))
        return total

    def __call__(self, x):
        parts, _ = self.contributions(x)
        return sum(parts.values())


def delta_a(x, gauge: GaugeSpec, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
            units: UnitSystem | None = None, t: float = 0.0,
            include_scalar_shift: bool = False) -> EffectiveFieldResult:
    """Gauge-variation field da(x), the vector contracting -(e/mc) p in dH2.

    The error estimate is the change between the radial rule and one of
    half the order, plus the rounding floor eps * sum|terms|.
    Per-polarization contributions are reported in ``extras``.
    """
    spec = spec or QuadratureSpec()
    r, _, _ = _polar(x)
    _check_radius(r, spec)
    if gauge.amplitude == 0:
        return EffectiveFieldResult(np.zeros(2), 0.0, spec,
                                    {"components": {lab.value: [0.0, 0.0] for lab in SPATIAL}})
    fine = GaugeVariationField(gauge, cfg, r, spec, units, t)
    coarse = GaugeVariationField(gauge, cfg, r, spec, units, t, n_radial=max(2, spec.n_radial // 2))
    parts, mag = fine.contributions(x)
    value = sum(parts.values())
    value_c = coarse(x)
    err = float(np.hypot(*(value - value_c))) + 4.0 * EPS * float(mag)
    extras = {"components": {k: v.tolist() for k, v in parts.items()}, "n_modes": fine.n_modes}
    if include_scalar_shift:
        extras["scalar_shift"] = fine.scalar_shift(x)
    return EffectiveFieldResult(value, err, spec, extras)


# ---------------------------------------------------------------------------
# scalar photons

def _coulomb_profile(k, units: UnitSystem, volume: float):
    """Radial integrand of the scalar-photon exchange between unit charges.

    The solid-angle integral of exp(ik.x) is 4 pi sin(kr)/(kr); that
    factor is applied by the caller.
    """
    k = np.asarray(k, dtype=float)
    kvec = np.stack([np.zeros_like(k), np.zeros_like(k), k], axis=-1)
    mode = PhotonMode(kvec, Polarization.SCALAR, units)
    left = me_scalar(mode, 1.0, (0.0, 0.0, 0.0), volume=volume)
    right = me_scalar(mode, 1.0, (0.0, 0.0, 0.0), volume=volume).adjoint()
    pair = np.real(pair_energy(left, right, units.hbar))
    return SCALAR_METRIC * pair * volume / (2.0 * math.pi) ** 3 * k ** 2 * 4.0 * math.pi


def coulomb_kernel(r: float, spec: QuadratureSpec | None = None,
                   units: UnitSystem | None = None) -> EffectiveFieldResult:
    """Scalar-photon exchange kernel K(r); e q K(r) is the interaction energy.

    The negative norm of scalar photons (``SCALAR_METRIC``) flips the sign
    of the naive second-order result so like charges repel.
    """
    spec = spec or QuadratureSpec()
    units = units or UnitSystem()
    if not r > 0:
        raise SingularityError("coulomb kernel needs r > 0")

    def integrand(k):
        return _coulomb_profile(k, units, spec.volume) * np.sinc(k * r / math.pi)

    rad = regulated_radial(integrand, r, spec)
    return EffectiveFieldResult(rad.value, rad.error_estimate, spec,
                                {"n_regulators": len(rad.epsilons)})


def coulomb_energy(charge: float, x, rho: ChargeDistribution,
                   spec: QuadratureSpec | None = None,
                   units: UnitSystem | None = None) -> EffectiveFieldResult:
    """e * sum_i q_i K(|x - x_i|) for a probe charge at x."""
    spec = spec or QuadratureSpec()
    x = embed(x)
    values, errs = [], []
    for q, pos in rho.point_charges:
        d = float(np.linalg.norm(x - np.asarray(pos)))
        if d == 0:
            raise SingularityError("probe coincides with a point charge")
        kr = coulomb_kernel(d, spec, units)
        values.append(charge * q * kr.value)
        errs.append(abs(charge * q) * kr.error_estimate)
    return EffectiveFieldResult(math.fsum(values), math.fsum(errs), spec)


def coulomb_gauge_comparison(r: float, spec: QuadratureSpec | None = None,
                             units: UnitSystem | None = None) -> dict:
    """Scalar-mode kernel with scalar photons present (Lorenz) and absent (Coulomb gauge)."""
    lorenz = coulomb_kernel(r, spec, units)
    coulomb_modes: tuple = ()  # no scalar modes in the Coulomb gauge
    coulomb = math.fsum(coulomb_modes)
    return {"r": r, "lorenz_mode_kernel": lorenz.value, "coulomb_gauge_kernel": coulomb,
            "difference": lorenz.value - coulomb, "error_estimate": lorenz.error_estimate}
