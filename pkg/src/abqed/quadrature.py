"""Bessel functions and regulated oscillatory integrals.

The radial mode integrals that appear in the effective interaction are
only conditionally convergent, e.g. the integral of J1(k r) over k.  They
are evaluated as ``lim eps->0  int_0^inf f(k) exp(-eps k) dk``: each
regulated integral is computed by Gauss-Legendre panels, and the limit is
taken by polynomial (Richardson/Neville) extrapolation in eps.

Radial and regulator reductions go through ``math.fsum``, which is
exactly rounded and therefore independent of summation order.  Inner
sums over large mode grids use numpy's pairwise summation over a fixed
node order, which is deterministic for a given grid.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, DomainError

EPS = np.finfo(float).eps
# exp(-REGULATOR_TAIL) ~ 1e-18 decides where a regulated integral is truncated
REGULATOR_TAIL = 41.5


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy and discretisation settings for the mode integrals.

    ``epsilon_schedule`` holds regulators in units of the distance r at
    which a radial integral is evaluated (eps = s * r).  ``volume`` is the
    box-normalisation volume of the plane-wave modes; it cancels in every
    continuum result.
    """

    k_max: float = math.inf
    epsilon_schedule: tuple[float, ...] = tuple(0.5 * 1.5 ** -j for j in range(12))
    n_angular: int = 64
    n_radial: int = 12
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    extrapolation_order: int | None = None
    volume: float = 1.0
    r_min: float = 1e-3

    def __post_init__(self):
        sched = tuple(float(s) for s in self.epsilon_schedule)
        object.__setattr__(self, "epsilon_schedule", sched)
        if len(sched) < 2 or any(s <= 0 for s in sched) or any(
                b >= a for a, b in zip(sched, sched[1:])):
            raise DomainError("epsilon_schedule must be positive and strictly decreasing")
        if self.n_angular < 64 or self.n_angular % 2:
            raise DomainError("n_angular must be even and at least 64")
        if self.n_radial < 2:
            raise DomainError("n_radial must be at least 2")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.extrapolation_order is not None and not (
                1 <= self.extrapolation_order < len(sched)):
            raise DomainError("extrapolation_order must be in [1, len(epsilon_schedule) - 1]")
        if not (self.volume > 0 and self.r_min > 0 and self.k_max > 0):
            raise DomainError("volume, r_min and k_max must be positive")

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    def scaled(self, factor: float) -> "QuadratureSpec":
        """Copy with both tolerances multiplied by ``factor``."""
        d = asdict(self)
        d["abs_tol"] *= factor
        d["rel_tol"] *= factor
        return QuadratureSpec(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilon_schedule"] = list(self.epsilon_schedule)
        if math.isinf(self.k_max):
            d["k_max"] = "inf"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QuadratureSpec":
        d = dict(d)
        if "k_max" in d:
            d["k_max"] = float(d["k_max"])
        if "epsilon_schedule" in d:
            d["epsilon_schedule"] = tuple(d["epsilon_schedule"])
        return cls(**d)


@dataclass(frozen=True)
class RadialResult:
    value: float | np.ndarray
    error_estimate: float
    regulated: tuple[float, ...]
    epsilons: tuple[float, ...]


# ---------------------------------------------------------------------------
# summation

def fsum(values) -> float:
    """Exactly rounded sum of a real array (flattened)."""
    return math.fsum(np.asarray(values, dtype=float).ravel())


def csum(values) -> complex:
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))


def vsum(values, axis: int = 0) -> np.ndarray:
    """Compensated sum along ``axis`` for real or complex arrays."""
    v = np.moveaxis(np.asarray(values), axis, -1)
    flat = v.reshape(-1, v.shape[-1])
    if np.iscomplexobj(flat):
        out = np.array([complex(math.fsum(row.real), math.fsum(row.imag)) for row in flat])
    else:
        out = np.array([math.fsum(row) for row in flat])
    return out.reshape(v.shape[:-1])


# ---------------------------------------------------------------------------
# Bessel functions J0, J1

_SERIES_MAX = 8.0
_MILLER_MAX = 25.0
_MILLER_START = 70


def _bessel_series(order: int, x: np.ndarray) -> np.ndarray:
    h2 = -(x / 2.0) ** 2
    term = (x / 2.0) ** order / math.factorial(order)
    total = term.copy()
    for m in range(1, 40):
        term = term * h2 / (m * (m + order))
        total += term
    return total


def _bessel_miller(order: int, x: np.ndarray) -> np.ndarray:
    # backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by
    # J0 + 2 sum_k J_2k = 1
    nxt = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j0 = j1 = None
    for n in range(_MILLER_START, 0, -1):
        prev = (2.0 * n / x) * cur - nxt
        nxt, cur = cur, prev
        # cur now holds J_{n-1}
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * cur
        if n - 1 == 1:
            j1 = cur.copy()
    j0 = cur
    norm += j0
    return (j0 if order == 0 else j1) / norm


def _bessel_asymptotic(order: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 40):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2:
            q += term * (-1) ** ((k - 1) // 2)
        else:
            p += term * (-1) ** (k // 2)
        if np.all(np.abs(term) < 1e-17):
            break
    # cos(x - phase) expanded so that numpy reduces x itself
    phase = (order / 2.0 + 0.25) * math.pi
    cx, sx = np.cos(x), np.sin(x)
    cos_chi = cx * math.cos(phase) + sx * math.sin(phase)
    sin_chi = sx * math.cos(phase) - cx * math.sin(phase)
    return np.sqrt(2.0 / (math.pi * x)) * (p * cos_chi - q * sin_chi)


def bessel_j(order: int, x):
    """Bessel function J0 or J1 for x >= 0 (scalar or array).

    Ascending series below 8, Miller backward recurrence on [8, 25),
    Hankel asymptotic expansion beyond.  Absolute error is below 1e-14
    over the tested range.
    """
    if order not in (0, 1):
        raise DomainError("only orders 0 and 1 are implemented")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or not np.all(np.isfinite(xa)):
        raise DomainError("bessel_j needs finite x >= 0")
    flat = xa.ravel()
    out = np.empty_like(flat)
    lo = flat < _SERIES_MAX
    mid = (flat >= _SERIES_MAX) & (flat < _MILLER_MAX)
    hi = flat >= _MILLER_MAX
    if lo.any():
        out[lo] = _bessel_series(order, flat[lo])
    if mid.any():
        out[mid] = _bessel_miller(order, flat[mid])
    if hi.any():
        out[hi] = _bessel_asymptotic(order, flat[hi])
    out = out.reshape(xa.shape)
    return float(out) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# node rules

@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(width: float, n_panels: int, n: int, start: float = 0.0):
    """Composite Gauss-Legendre nodes for ``n_panels`` panels of ``width``."""
    x, w = gauss_legendre(n)
    left = start + width * np.arange(n_panels)
    k = (left[:, None] + 0.5 * width * (x + 1.0)).ravel()
    wk = np.tile(0.5 * width * w, n_panels)
    return k, wk


def angular_nodes(n: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n) / n


def angular_count(kr_max: float, minimum: int = 64, harmonic: int = 0) -> int:
    """Even trapezoid node count resolving exp(i kr cos phi) * cos(harmonic phi)."""
    z = abs(kr_max) + abs(harmonic)
    n = int(math.ceil(z + 12.0 * z ** (1.0 / 3.0) + 40.0))
    n = max(n, minimum)
    return n + (n % 2)


def angular_average(integrand: Callable[[np.ndarray], np.ndarray], n_angular: int = 64):
    """Trapezoid rule for the integral of a 2*pi-periodic function over [0, 2*pi).

    ``integrand`` receives the node array and may return values of shape
    (n,) or (n, d); the result has the trailing shape.  Despite the name
    the full integral (not the mean) is returned.
    """
    phi = angular_nodes(n_angular)
    vals = np.asarray(integrand(phi))
    weight = 2.0 * math.pi / n_angular
    if vals.ndim == 1:
        s = csum(vals) if np.iscomplexobj(vals) else fsum(vals)
        return weight * s
    return weight * vsum(vals, axis=0)


# ---------------------------------------------------------------------------
# regulated radial integrals

def _kernel(name: str, r: float) -> Callable[[np.ndarray], np.ndarray]:
    if name == "J1":
        return lambda k: bessel_j(1, k * r)
    if name == "J0":
        return lambda k: bessel_j(0, k * r)
    if name == "one_over_k2_3d":
        # radial reduction of int d^3k/(2pi)^3 (4pi/k^2) exp(ik.x)
        return lambda k: (2.0 / math.pi) * np.sinc(k * r / math.pi)
    raise DomainError(f"unknown radial kernel {name!r}")


def neville_zero(h: Sequence[float], values: Sequence[float]) -> list[float]:
    """Diagonal of the Neville tableau extrapolating values(h) to h = 0.

    Entry m of the returned list is the degree-m interpolant through the
    first m+1 points evaluated at zero.
    """
    h = list(h)
    p = list(values)
    diag = [p[0]]
    n = len(p)
    # tab[i] holds the interpolant through points i..i+m
    for m in range(1, n):
        p = [(h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m]) for i in range(n - m)]
        diag.append(p[0])
    return diag


def _lagrange_norm(h: Sequence[float]) -> float:
    """Sum of |Lagrange weights| at zero: amplification of per-point noise."""
    h = np.asarray(h)
    total = 0.0
    for i in range(len(h)):
        others = np.delete(h, i)
        total += abs(np.prod(others / (others - h[i])))
    return float(total)


def regulated_radial(kernel, r: float, spec: QuadratureSpec | None = None) -> RadialResult:
    """Limit eps -> 0 of the integral of f(k) exp(-eps k) over k in [0, inf).

    ``kernel`` is one of ``"J1"``, ``"J0"``, ``"one_over_k2_3d"`` (each of
    which integrates to 1/r) or a vectorised callable f(k) returning shape
    (n,) or (n, d).  ``r`` fixes the
    length scale: regulators are eps = s * r for s in the schedule and
    panels are half a period (pi / r) wide.

    Regulators are added one at a time until successive extrapolants agree
    to the QuadratureSpec tolerance.  The error estimate is that difference
    plus the rounding floor amplified by the extrapolation weights.
    """
    spec = spec or QuadratureSpec()
    if not r > 0:
        raise DomainError("regulated_radial needs r > 0")
    f = _kernel(kernel, r) if isinstance(kernel, str) else kernel
    sched = spec.epsilon_schedule
    if spec.extrapolation_order is not None:
        sched = sched[: spec.extrapolation_order + 1]
    eps = [s * r for s in sched]
    width = math.pi / r

    k_nodes = np.empty(0)
    w_nodes = np.empty(0)
    f_nodes = None
    regulated, floors = [], []
    diag = []
    est = math.inf
    for j, e in enumerate(eps):
        k_end = min(REGULATOR_TAIL / e, spec.k_max)
        n_need = int(math.ceil(k_end / width))
        n_have = len(k_nodes) // spec.n_radial
        if n_need > n_have:
            k_new, w_new = panel_nodes(width, n_need - n_have, spec.n_radial, start=n_have * width)
            f_new = np.asarray(f(k_new), dtype=float)
            k_nodes = np.concatenate([k_nodes, k_new])
            w_nodes = np.concatenate([w_nodes, w_new])
            f_nodes = f_new if f_nodes is None else np.concatenate([f_nodes, f_new])
        n_use = n_need * spec.n_radial
        weights = w_nodes[:n_use] * np.exp(-e * k_nodes[:n_use])
        terms = weights.reshape((-1,) + (1,) * (f_nodes.ndim - 1)) * f_nodes[:n_use]
        if terms.ndim == 1:
            regulated.append(fsum(terms))
            floors.append(EPS * float(np.sum(np.abs(terms))))
        else:
            regulated.append(vsum(terms, axis=0))
            floors.append(EPS * float(np.max(np.sum(np.abs(terms), axis=0))))
        if j == 0:
            continue
        diag = neville_zero(eps[: j + 1], regulated)
        floor = _lagrange_norm(eps[: j + 1]) * max(floors)
        est = float(np.max(np.abs(diag[-1] - diag[-2]))) + floor
        if j >= 2 and est <= spec.tolerance(float(np.max(np.abs(diag[-1])))):
            break
    value = diag[-1]
    if est > spec.tolerance(float(np.max(np.abs(value)))):
        raise AccuracyError(
            f"regulator extrapolation did not converge: estimate {value!r} +- {est:.3e}",
            estimate=value, error_estimate=est)
    return RadialResult(value, est, tuple(regulated), tuple(eps[: len(regulated)]))
