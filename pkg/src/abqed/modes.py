"""Photon-mode algebra for the planar charge/fluxon problem.

Vectors are embedded in 3D with explicit z components, so the magnetic
unit vector is literally ``n_hat = k_hat x e_hat``.  Modes are plane
waves u_k(x) = exp(i k.x)/sqrt(V); ``PhotonMode`` accepts a batch of
wavevectors (shape ``(..., 2)`` or ``(..., 3)``) so whole quadrature
grids can be pushed through the same code as a single mode.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import CurrentLoop, UnitSystem
from .errors import ConfigError, ContractError, DomainError
from .quadrature import fsum, gauss_legendre


class Polarization(str, enum.Enum):
    IN_PLANE = "in-plane-transverse"
    OUT_OF_PLANE = "out-of-plane-transverse"
    LONGITUDINAL = "longitudinal"
    SCALAR = "scalar"

    @property
    def transverse(self) -> bool:
        return self in (Polarization.IN_PLANE, Polarization.OUT_OF_PLANE)


TRANSVERSE = (Polarization.IN_PLANE, Polarization.OUT_OF_PLANE)
SPATIAL = (Polarization.IN_PLANE, Polarization.OUT_OF_PLANE, Polarization.LONGITUDINAL)

Z_HAT = np.array([0.0, 0.0, 1.0])


def embed(v) -> np.ndarray:
    """Pad planar vectors (..., 2) with a zero z component."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] == 3:
        return v
    if v.shape[-1] != 2:
        raise DomainError("expected 2- or 3-vectors")
    return np.concatenate([v, np.zeros(v.shape[:-1] + (1,))], axis=-1)


@dataclass(frozen=True)
class PhotonMode:
    k: np.ndarray
    label: Polarization = Polarization.IN_PLANE
    units: UnitSystem = field(default_factory=UnitSystem)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.shape[-1] not in (2, 3):
            raise DomainError("wavevector must be a 2- or 3-vector")
        object.__setattr__(self, "label", Polarization(self.label))
        if k.shape[-1] == 3 and self.label is not Polarization.SCALAR and np.any(k[..., 2] != 0):
            raise ContractError("spatial polarizations are defined for in-plane wavevectors only")
        if np.any(np.linalg.norm(k, axis=-1) == 0):
            raise DomainError("zero wavevector")
        object.__setattr__(self, "k", k)

    @cached_property
    def k3(self) -> np.ndarray:
        return embed(self.k)

    @cached_property
    def kmag(self):
        return np.linalg.norm(self.k, axis=-1)

    @cached_property
    def k_hat(self) -> np.ndarray:
        return self.k3 / self.kmag[..., None]

    @cached_property
    def omega(self):
        return self.units.c * self.kmag

    @cached_property
    def alpha(self):
        """Normalisation sqrt(2 pi hbar c^2 / omega)."""
        return np.sqrt(2.0 * math.pi * self.units.hbar * self.units.c ** 2 / self.omega)

    @cached_property
    def e_hat(self) -> np.ndarray:
        kh = self.k_hat
        if self.label is Polarization.IN_PLANE:
            return np.cross(Z_HAT, kh)
        if self.label is Polarization.OUT_OF_PLANE:
            return np.broadcast_to(Z_HAT, kh.shape).copy()
        if self.label is Polarization.LONGITUDINAL:
            return kh
        return np.zeros_like(kh)

    @cached_property
    def n_hat(self) -> np.ndarray:
        return np.cross(self.k_hat, self.e_hat)

    def u(self, x, volume: float = 1.0):
        """Plane-wave mode function exp(i k.x)/sqrt(V)."""
        x = embed(x)
        return np.exp(1j * np.sum(self.k3 * x, axis=-1)) / math.sqrt(volume)

    def time_factor(self, t: float):
        """exp(-i omega t)."""
        if t == 0:
            return 1.0
        return np.exp(-1j * self.omega * t)


def _require_spatial(mode: PhotonMode):
    if mode.label is Polarization.SCALAR:
        raise ContractError("the vector potential has no scalar-mode component")


def mode_A(mode: PhotonMode, x, t: float = 0.0, volume: float = 1.0):
    """Annihilation and creation coefficients of A for one mode at (x, t)."""
    _require_spatial(mode)
    amp = mode.alpha * mode.u(x, volume) * mode.time_factor(t)
    ann = np.asarray(amp)[..., None] * mode.e_hat
    return ann, np.conj(ann)


def mode_B(mode: PhotonMode, x, t: float = 0.0, volume: float = 1.0):
    """Coefficients of B = curl A; the creation part carries a relative minus sign."""
    _require_spatial(mode)
    amp = 1j * mode.kmag * mode.alpha * mode.u(x, volume) * mode.time_factor(t)
    ann = np.asarray(amp)[..., None] * mode.n_hat
    # -i k alpha u* e^{+i w t} n_hat
    return ann, np.conj(ann)


def polarization_identity_sum(k_hat, p) -> np.ndarray:
    """Sum over transverse modes of (e_hat . p)(z . n_hat) for unit k_hat.

    Equals phi_hat(k) . p, the azimuthal component of p in k-space.
    """
    k_hat = np.asarray(k_hat, dtype=float)
    norm = np.linalg.norm(k_hat, axis=-1)
    if np.any(norm == 0):
        raise DomainError("azimuthal direction undefined for k = 0")
    p3 = embed(p)
    total = 0.0
    for label in TRANSVERSE:
        mode = PhotonMode(k_hat, label)
        total = total + np.sum(mode.e_hat * p3, axis=-1) * mode.n_hat[..., 2]
    return total


def phi_hat(k) -> np.ndarray:
    k3 = embed(k)
    return np.cross(Z_HAT, k3 / np.linalg.norm(k3, axis=-1, keepdims=True))


# ---------------------------------------------------------------------------
# gauge functions

GAUGE_FAMILIES = ("real-isotropic", "complex-isotropic", "anisotropic")


class ChiPrimitive:
    """Single-valued smooth scalar field chi(x) with analytic gradient."""

    kind = ""

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Polynomial(ChiPrimitive):
    """Sum of c * x**i * y**j over ``terms`` = ((i, j, c), ...)."""

    terms: tuple[tuple[int, int, float], ...]
    kind = "polynomial"

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return sum(c * x[..., 0] ** i * x[..., 1] ** j for i, j, c in self.terms)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        gx = sum(c * i * x[..., 0] ** max(i - 1, 0) * x[..., 1] ** j
                 for i, j, c in self.terms if i > 0)
        gy = sum(c * j * x[..., 0] ** i * x[..., 1] ** max(j - 1, 0)
                 for i, j, c in self.terms if j > 0)
        gx = np.zeros(x.shape[:-1]) + gx
        gy = np.zeros(x.shape[:-1]) + gy
        return np.stack([gx, gy], axis=-1)

    def to_dict(self):
        return {"kind": self.kind, "terms": [list(t) for t in self.terms]}


@dataclass(frozen=True)
class GaussianBump(ChiPrimitive):
    amplitude: float
    center: tuple[float, float]
    width: float
    kind = "gaussian"

    def value(self, x):
        d = np.asarray(x, dtype=float) - np.asarray(self.center)
        return self.amplitude * np.exp(-np.sum(d * d, axis=-1) / (2.0 * self.width ** 2))

    def gradient(self, x):
        d = np.asarray(x, dtype=float) - np.asarray(self.center)
        return -(self.value(x) / self.width ** 2)[..., None] * d

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude,
                "center": list(self.center), "width": self.width}


@dataclass(frozen=True)
class AzimuthalHarmonic(ChiPrimitive):
    """amplitude * rho**order * cos(order*theta - phase) about ``center``.

    Written as Re[exp(-i phase) (z - c)**order]: a polynomial, so
    single-valued everywhere.
    """

    amplitude: float
    order: int
    center: tuple[float, float] = (0.0, 0.0)
    phase: float = 0.0
    kind = "azimuthal-harmonic"

    def _z(self, x):
        x = np.asarray(x, dtype=float)
        return (x[..., 0] - self.center[0]) + 1j * (x[..., 1] - self.center[1])

    def value(self, x):
        return self.amplitude * np.real(cmath.exp(-1j * self.phase) * self._z(x) ** self.order)

    def gradient(self, x):
        n = self.order
        if n == 0:
            return np.zeros(np.shape(x))
        w = self.amplitude * n * cmath.exp(-1j * self.phase) * self._z(x) ** (n - 1)
        # f holomorphic: d/dx Re f = Re f', d/dy Re f = -Im f'
        return np.stack([np.real(w), -np.imag(w)], axis=-1)

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude, "order": self.order,
                "center": list(self.center), "phase": self.phase}


def chi_from_dict(d: dict) -> ChiPrimitive:
    kind = d.get("kind")
    try:
        if kind == "polynomial":
            return Polynomial(tuple((int(i), int(j), float(c)) for i, j, c in d["terms"]))
        if kind == "gaussian":
            return GaussianBump(float(d["amplitude"]), tuple(d["center"]), float(d["width"]))
        if kind == "azimuthal-harmonic":
            return AzimuthalHarmonic(float(d["amplitude"]), int(d["order"]),
                                     tuple(d.get("center", (0.0, 0.0))), float(d.get("phase", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad chi primitive {d!r}: {exc}") from exc
    raise ConfigError(f"unknown chi primitive kind {kind!r}")


@dataclass(frozen=True)
class GaugeSpec:
    """Gauge-mode coefficients gamma(k) = amplitude * exp(-|k|/width) * cos(harmonic*phi_k).

    The angular factor is only present for the anisotropic family.  ``chi``
    is a sum of primitives used for the semiclassical comparison.
    """

    family: str = "real-isotropic"
    amplitude: complex = 1.0
    width: float = 1.0
    harmonic: int = 0
    chi: tuple[ChiPrimitive, ...] = ()

    def __post_init__(self):
        if self.family not in GAUGE_FAMILIES:
            raise ConfigError(f"unknown gauge family {self.family!r}")
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        object.__setattr__(self, "chi", tuple(self.chi))
        if not self.width > 0:
            raise ConfigError("gauge envelope width must be positive")
        if self.family == "real-isotropic" and self.amplitude.imag != 0:
            raise ConfigError("real-isotropic gauge needs a real amplitude")
        if self.family != "anisotropic" and self.harmonic != 0:
            raise ConfigError("only the anisotropic family carries an angular harmonic")
        if self.family == "anisotropic" and self.harmonic < 1:
            raise ConfigError("anisotropic gauge needs harmonic >= 1")

    def gamma(self, k):
        """gamma at planar wavevector(s) ``k``."""
        k = np.asarray(k, dtype=float)
        kmag = np.linalg.norm(k[..., :2], axis=-1)
        g = self.amplitude * np.exp(-kmag / self.width)
        if self.family == "anisotropic":
            g = g * np.cos(self.harmonic * np.arctan2(k[..., 1], k[..., 0]))
        return g

    def chi_value(self, x):
        x = np.asarray(x, dtype=float)
        return sum((p.value(x) for p in self.chi), np.zeros(x.shape[:-1]))

    def chi_gradient(self, x):
        x = np.asarray(x, dtype=float)
        return sum((p.gradient(x) for p in self.chi), np.zeros(x.shape))

    def to_dict(self) -> dict:
        return {"family": self.family,
                "amplitude": [self.amplitude.real, self.amplitude.imag],
                "width": self.width, "harmonic": self.harmonic,
                "chi": [p.to_dict() for p in self.chi]}

    @classmethod
    def from_dict(cls, d: dict) -> "GaugeSpec":
        amp = d.get("amplitude", 1.0)
        if isinstance(amp, (list, tuple)):
            if len(amp) != 2:
                raise ConfigError("complex amplitude must be [re, im]")
            amp = complex(float(amp[0]), float(amp[1]))
        return cls(family=d.get("family", "real-isotropic"), amplitude=amp,
                   width=float(d.get("width", 1.0)), harmonic=int(d.get("harmonic", 0)),
                   chi=tuple(chi_from_dict(c) for c in d.get("chi", ())))


def random_gauge(rng: np.random.Generator, family: str) -> GaugeSpec:
    """Draw a gauge of ``family`` with width in [0.5, 1.5] and one random chi primitive."""
    width = float(rng.uniform(0.5, 1.5))
    mag = float(rng.uniform(0.3, 2.0)) * float(rng.choice([-1.0, 1.0]))
    harmonic = 0
    if family == "real-isotropic":
        amp = complex(mag)
    elif family == "complex-isotropic":
        amp = mag * complex(np.exp(1j * rng.uniform(0.2, math.pi - 0.2)))
    elif family == "anisotropic":
        amp = mag * complex(np.exp(1j * rng.uniform(0.0, 2.0 * math.pi)))
        harmonic = int(rng.integers(1, 4))
    else:
        raise ConfigError(f"unknown gauge family {family!r}")
    kind = int(rng.integers(0, 3))
    if kind == 0:
        chi = Polynomial(((int(rng.integers(0, 3)), int(rng.integers(1, 3)),
                           float(rng.uniform(-1.0, 1.0))),))
    elif kind == 1:
        chi = GaussianBump(float(rng.uniform(0.2, 1.0)), tuple(rng.uniform(-1.0, 1.0, 2).tolist()),
                           float(rng.uniform(0.3, 1.0)))
    else:
        chi = AzimuthalHarmonic(float(rng.uniform(0.2, 1.0)), int(rng.integers(1, 4)),
                                (0.0, 0.0), float(rng.uniform(0.0, 2.0 * math.pi)))
    return GaugeSpec(family, amp, width, harmonic, (chi,))


def zero_gauge() -> GaugeSpec:
    return GaugeSpec("real-isotropic", 0.0)


def grad_lambda(k, gauge: GaugeSpec, x, t: float = 0.0, volume: float = 1.0,
                units: UnitSystem | None = None):
    """Annihilation/creation coefficients of grad(Lambda) for wavevector k.

    Purely longitudinal: both parts are multiples of k_hat.
    """
    mode = PhotonMode(k, Polarization.LONGITUDINAL, units or UnitSystem())
    g = gauge.gamma(mode.k)
    amp = 1j * mode.kmag * g * mode.u(x, volume) * mode.time_factor(t)
    ann = np.asarray(amp)[..., None] * mode.k_hat
    cre = np.asarray(np.conj(amp))[..., None] * mode.k_hat
    return ann, cre


@dataclass(frozen=True)
class GradLambdaField:
    """One plane-wave component of grad(Lambda), usable as a Stokes-check field."""

    k: np.ndarray
    gauge: GaugeSpec


# ---------------------------------------------------------------------------
# Stokes check

@dataclass(frozen=True)
class StokesResult:
    line_integral: float
    surface_integral: float
    rel_error: float
    vb_line: float
    vb_surface: float
    step: float


def _triangle_rule(n: int):
    """Collapsed Gauss-Legendre rule on the reference triangle (0,0),(1,0),(0,1)."""
    x, w = gauss_legendre(n)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * w
    u = s[:, None] * np.ones(n)[None, :]
    v = (1.0 - s)[:, None] * s[None, :]
    wt = ws[:, None] * ws[None, :] * (1.0 - s)[:, None]
    return u.ravel(), v.ravel(), wt.ravel()


def _field_and_curl(src, units: UnitSystem, volume: float, t: float):
    if isinstance(src, GradLambdaField):
        def fld(x):
            ann, _ = grad_lambda(src.k, src.gauge, x, t, volume, units)
            return np.real(ann[..., :2])

        def curl(x):
            return np.zeros(np.shape(x)[:-1])
        return fld, curl
    if not isinstance(src, PhotonMode):
        raise ContractError("stokes_check needs a PhotonMode or GradLambdaField")
    if np.ndim(src.k) != 1:
        raise ContractError("stokes_check takes a single mode")

    def fld(x):
        ann, _ = mode_A(src, x, t, volume)
        return np.real(ann[..., :2])

    def curl(x):
        ann, _ = mode_B(src, x, t, volume)
        return np.real(ann[..., 2])
    return fld, curl


def stokes_check(field_src, loop: CurrentLoop, step: float, units: UnitSystem | None = None,
                 volume: float = 1.0, t: float = 0.0, tolerance: float = 1e-6) -> StokesResult:
    """Line integral of Re(A) around ``loop`` against the flux of its curl.

    The line integral uses the composite trapezoid rule with 2**j
    subintervals per edge, spacing at most ``step`` (second order in
    ``step``).  The surface integral is a high-order signed triangle fan,
    valid for any simple or self-winding polygon because the plane-wave
    field is entire.  ``rel_error`` is
    normalised by the integral of |curl| over the enclosed region, or by
    max|F| * perimeter when the curl vanishes identically.
    """
    if not isinstance(loop, CurrentLoop) or not loop.loop.closed:
        raise ContractError("stokes_check needs a closed current loop")
    units = units or UnitSystem()
    fld, curl = _field_and_curl(field_src, units, volume, t)
    verts = loop.loop.vertices

    line_terms, fmax, perimeter = [], 0.0, 0.0
    for a, b in zip(verts[:-1], verts[1:]):
        d = b - a
        length = float(np.hypot(*d))
        if length == 0:
            continue
        # a power of two, so halving ``step`` exactly doubles every edge's subdivision
        n = 1 << max(0, math.ceil(math.log2(length / step)))
        s = np.linspace(0.0, 1.0, n + 1)
        pts = a + s[:, None] * d
        f = fld(pts) @ d
        w = np.full(n + 1, 1.0 / n)
        w[0] = w[-1] = 0.5 / n
        line_terms.append(w * f)
        fmax = max(fmax, float(np.max(np.hypot(*fld(pts).T))))
        perimeter += length
    line = fsum(np.concatenate(line_terms))

    centre = verts[:-1].mean(axis=0)
    u, v, wt = _triangle_rule(24)
    surf_terms, abs_terms = [], []
    for a, b in zip(verts[:-1], verts[1:]):
        e1, e2 = a - centre, b - centre
        jac = e1[0] * e2[1] - e1[1] * e2[0]
        if jac == 0:
            continue
        pts = centre + u[:, None] * e1 + v[:, None] * e2
        c = curl(pts)
        surf_terms.append(jac * wt * c)
        abs_terms.append(abs(jac) * wt * np.abs(c))
    surface = fsum(np.concatenate(surf_terms)) if surf_terms else 0.0
    scale = fsum(np.concatenate(abs_terms)) if abs_terms else 0.0
    if scale == 0.0:
        scale = fmax * perimeter
    diff = abs(line - surface)
    rel = 0.0 if diff == 0.0 else diff / scale
    c = units.c
    return StokesResult(line, surface, rel, -(loop.current / c) * line,
                        -(loop.current / c) * surface, step)
