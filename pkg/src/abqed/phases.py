"""Phases accumulated along paths, the Andreev-interferometer local phase and
the QED-versus-semiclassical contrast.

A *field handle* is any callable mapping points of shape (n, 2) to field
vectors of shape (n, 2).  Handles may additionally provide

* ``singular_points`` and ``r_min``: points the path must keep away from;
* ``evaluate(x) -> (values, errors)``: per-point error estimates, which
  are integrated along the path and added to the quadrature estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Chebyshev

from .core import ChargeFluxConfig, PathGeometry, UnitSystem, subtended_angle, winding_number
from .errors import AccuracyError, DomainError, SingularityError
from .interaction import GaugeVariationField, analytic_a, effective_a_theta
from .modes import ChiPrimitive, GaugeSpec
from .quadrature import QuadratureSpec, fsum, gauss_legendre

DEFAULT_ORDER = 10
MAX_LEVELS = 60


@dataclass(frozen=True)
class PhaseResult:
    """(charge / hbar c) times the line integral, with its pieces."""

    phase: float
    integral: float
    error_estimate: float
    n_intervals: int
    n_evaluations: int


# ---------------------------------------------------------------------------
# field handles

@dataclass(frozen=True)
class AnalyticAField:
    """Phi theta_hat / (2 pi |x - fluxon|)."""

    Phi: float = 2.0 * math.pi
    fluxon: tuple[float, float] = (0.0, 0.0)
    r_min: float = 1e-3

    @property
    def singular_points(self):
        return (self.fluxon,)

    def __call__(self, x):
        return analytic_a(x, self.Phi, self.fluxon)


class NumericAField:
    """The mode-sum effective potential as a field handle.

    Without ``r_range`` every distinct distance |x - x_b| gets its own
    regulated radial integral (batched per call).  With ``r_range`` the
    dimensionless profile r a_theta(r) is computed once at Chebyshev points
    in log r over that range and interpolated; the interpolation error is
    estimated from the trailing Chebyshev coefficients and added to the
    radial error estimate.
    """

    def __init__(self, cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
                 units: UnitSystem | None = None, t: float = 0.0,
                 r_range: tuple[float, float] | None = None, degree: int = 24):
        self.cfg = cfg
        self.spec = spec or QuadratureSpec()
        self.units = units or UnitSystem()
        self.t = t
        self.r_min = self.spec.r_min
        self.r_range = r_range
        self._cache: dict[float, tuple[float, float]] = {}
        self._table = None
        if r_range is not None:
            lo, hi = (float(v) for v in r_range)
            if not self.r_min <= lo < hi:
                raise DomainError(f"bad tabulation range {r_range!r}")
            self._build_table(lo, hi, degree)

    def _build_table(self, lo: float, hi: float, degree: int) -> None:
        errs = []

        def profile(logr):
            a, e = effective_a_theta(np.exp(logr), self.cfg, self.spec, self.units, self.t)
            errs.append(float(np.max(e * np.exp(logr))))
            return a * np.exp(logr)

        cheb = Chebyshev.interpolate(profile, degree, domain=[math.log(lo), math.log(hi)])
        tail = float(np.sum(np.abs(cheb.coef[-3:])))
        self._table = (cheb, max(errs) + tail)

    @property
    def singular_points(self):
        return (self.cfg.x_b,)

    def _a_theta(self, r: np.ndarray):
        if self._table is not None:
            cheb, err = self._table
            lo, hi = self.r_range
            if np.any(r < lo * (1 - 1e-12)) or np.any(r > hi * (1 + 1e-12)):
                raise DomainError("point outside the tabulated distance range")
            return cheb(np.log(r)) / r, err / r
        new = sorted({float(v) for v in r} - self._cache.keys())
        if new:
            a, e = effective_a_theta(np.array(new), self.cfg, self.spec, self.units, self.t)
            self._cache.update(zip(new, zip(a.tolist(), e.tolist())))
        got = np.array([self._cache[float(v)] for v in r]).reshape(-1, 2)
        return got[:, 0], got[:, 1]

    def evaluate(self, x):
        d = np.asarray(x, dtype=float).reshape(-1, 2) - np.asarray(self.cfg.x_b)
        r = np.hypot(d[:, 0], d[:, 1])
        if np.any(~(r >= self.r_min)):
            raise SingularityError(f"|x - x_b| = {float(np.min(r))!r} is below r_min")
        a_theta, errs = self._a_theta(r)
        vals = (a_theta / r)[:, None] * np.column_stack([-d[:, 1], d[:, 0]])
        return vals, errs

    def __call__(self, x):
        return self.evaluate(x)[0]


class DeltaAField:
    """Gauge-variation field da on a grid sized for points within ``r_max`` of x_b."""

    def __init__(self, gauge: GaugeSpec, cfg: ChargeFluxConfig, r_max: float,
                 spec: QuadratureSpec | None = None, units: UnitSystem | None = None,
                 t: float = 0.0):
        self.cfg = cfg
        self.grid = GaugeVariationField(gauge, cfg, r_max, spec, units, t)
        self.r_min = self.grid.spec.r_min

    @property
    def singular_points(self):
        return (self.cfg.x_b,)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.grid(x - np.asarray(self.cfg.x_b))


@dataclass(frozen=True)
class ChiGradientField:
    """grad chi for a sum of primitives (no singular points)."""

    chi: tuple[ChiPrimitive, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum((p.gradient(x) for p in self.chi), np.zeros(x.shape))


@dataclass(frozen=True)
class SumField:
    """Pointwise sum of field handles."""

    parts: tuple

    @property
    def singular_points(self):
        return tuple(p for f in self.parts for p in getattr(f, "singular_points", ()))

    @property
    def r_min(self):
        return max((getattr(f, "r_min", 0.0) for f in self.parts), default=0.0)

    def evaluate(self, x):
        vals, errs = 0.0, 0.0
        for f in self.parts:
            v, e = _evaluate(f, x)
            vals, errs = vals + v, errs + e
        return vals, errs

    def __call__(self, x):
        return self.evaluate(x)[0]


@dataclass(frozen=True)
class SemiclassicalField:
    """Azimuthal base field plus the residual gauge freedom grad chi."""

    Phi: float = 2.0 * math.pi
    fluxon: tuple[float, float] = (0.0, 0.0)
    chi: tuple[ChiPrimitive, ...] = ()
    r_min: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "chi", tuple(self.chi))
        object.__setattr__(self, "fluxon", tuple(float(v) for v in self.fluxon))

    @classmethod
    def from_gauge(cls, gauge: GaugeSpec, Phi: float, fluxon=(0.0, 0.0)):
        return cls(Phi, fluxon, gauge.chi)

    @property
    def singular_points(self):
        return (self.fluxon,)

    @property
    def base(self) -> AnalyticAField:
        return AnalyticAField(self.Phi, self.fluxon, self.r_min)

    def chi_value(self, x):
        x = np.asarray(x, dtype=float)
        return sum((p.value(x) for p in self.chi), np.zeros(x.shape[:-1]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.base(x) + ChiGradientField(self.chi)(x)


def tabulated_a(cfg: ChargeFluxConfig, path: PathGeometry, spec: QuadratureSpec | None = None,
                units: UnitSystem | None = None, t: float = 0.0) -> NumericAField:
    """NumericAField tabulated over the distance range that ``path`` spans from x_b."""
    spec = spec or QuadratureSpec()
    lo = path.min_distance(cfg.x_b)
    if not lo >= spec.r_min:
        raise SingularityError(f"path comes within {lo!r} of the fluxon")
    rel = path.vertices - np.asarray(cfg.x_b)
    hi = float(np.max(np.hypot(rel[:, 0], rel[:, 1])))
    return NumericAField(cfg, spec, units, t, r_range=(lo, max(hi, 1.001 * lo)))


def _evaluate(f, x):
    if hasattr(f, "evaluate"):
        return f.evaluate(x)
    return f(x), np.zeros(len(x))


# ---------------------------------------------------------------------------
# line integrals

def _check_path(f, path: PathGeometry) -> None:
    r_min = getattr(f, "r_min", 0.0)
    for p in getattr(f, "singular_points", ()):
        d = path.min_distance(p)
        if not d >= max(r_min, 1e-300):
            raise SingularityError(f"path comes within {d!r} of the singular point {tuple(p)}")


def line_integral(f: Callable, path: PathGeometry, tol: float = 1e-13,
                  order: int = DEFAULT_ORDER) -> tuple[float, float, int, int]:
    """Adaptive Gauss-Legendre integral of f . dx along a polygonal path.

    Each interval is integrated whole and as two halves; the difference is
    the local error.  An interval is accepted when that error is below its
    share of ``tol`` (the initial share is tol / segment count, halved on
    each bisection).  All intervals of a level are evaluated in one field
    call.  Returns (integral, error_estimate, intervals, evaluations).
    """
    _check_path(f, path)
    segs = list(path.segments())
    if not segs:
        return 0.0, 0.0, 0, 0
    xg, wg = gauss_legendre(order)
    w2 = np.concatenate([wg, wg])
    node = 0.5 * (xg + 1)
    halves_frac = np.concatenate([0.5 * node, 0.5 + 0.5 * node])

    def integrate(items, frac):
        # one field call for every interval of the level
        a = np.array([it[0] for it in items])
        d = np.array([it[1] for it in items]) - a
        pts = a[:, None, :] + frac[None, :, None] * d[:, None, :]
        vals, errs = _evaluate(f, pts.reshape(-1, 2))
        proj = np.sum(np.asarray(vals).reshape(pts.shape) * d[:, None, :], axis=-1)
        length = np.hypot(d[:, 0], d[:, 1])[:, None]
        ferr = np.asarray(errs, dtype=float).reshape(pts.shape[:2]) * length
        return proj, ferr, pts.shape[0] * pts.shape[1]

    # each pending interval carries its whole-interval rule, inherited from the parent's half
    pending = [(np.asarray(a, float), np.asarray(b, float), tol / len(segs)) for a, b in segs]
    proj, _, n_eval = integrate(pending, node)
    wholes = [0.5 * math.fsum(wg * row) for row in proj]
    accepted, errors = [], []
    for _ in range(MAX_LEVELS):
        if not pending:
            break
        proj, ferr, n = integrate(pending, halves_frac)
        n_eval += n
        nxt, nxt_wholes = [], []
        for i, (pa, pb, share) in enumerate(pending):
            left = 0.25 * math.fsum(wg * proj[i, :order])
            right = 0.25 * math.fsum(wg * proj[i, order:])
            halves = left + right
            local = abs(wholes[i] - halves)
            tiny = np.hypot(*(pb - pa)) < 1e-15 * max(1.0, float(np.hypot(*pa)))
            if local <= share or tiny:
                accepted.append(halves)
                errors.append(local + 0.25 * math.fsum(w2 * ferr[i]))
            else:
                mid = pa + 0.5 * (pb - pa)
                nxt += [(pa, mid, 0.5 * share), (mid, pb, 0.5 * share)]
                nxt_wholes += [left, right]
        pending, wholes = nxt, nxt_wholes
    if pending:
        raise AccuracyError("line integral did not converge", fsum(accepted), math.inf)
    return fsum(accepted), fsum(errors), len(accepted), n_eval


def phase_along_path(f: Callable, path: PathGeometry, charge: float,
                     units: UnitSystem | None = None, tol: float = 1e-13,
                     order: int = DEFAULT_ORDER) -> PhaseResult:
    """(charge / hbar c) * integral of f . dx along ``path``.

    ``tol`` bounds the quadrature error of the line integral itself.
    """
    units = units or UnitSystem()
    integral, err, n_int, n_eval = line_integral(f, path, tol, order)
    scale = charge / (units.hbar * units.c)
    return PhaseResult(scale * integral, integral, abs(scale) * err, n_int, n_eval)


# ---------------------------------------------------------------------------
# interferometer

@dataclass(frozen=True)
class InterferometerGeometry:
    """Two superconducting contacts s1, s2, a normal electrode n and a fluxon.

    ``path_c`` defaults to the polygon s1 -> n -> s2.
    """

    s1: tuple[float, float]
    s2: tuple[float, float]
    n: tuple[float, float]
    fluxon: tuple[float, float] = (0.0, 0.0)
    path_c: PathGeometry | None = field(default=None)

    def __post_init__(self):
        for name in ("s1", "s2", "n", "fluxon"):
            v = tuple(float(c) for c in getattr(self, name))
            if len(v) != 2:
                raise DomainError(f"{name} must be a 2-vector")
            object.__setattr__(self, name, v)
        if self.path_c is None:
            object.__setattr__(self, "path_c", PathGeometry([self.s1, self.n, self.s2]))
        if self.path_c.min_distance(self.fluxon) <= 0.0:
            raise DomainError("the fluxon lies on path C")

    def to_dict(self) -> dict:
        return {"s1": list(self.s1), "s2": list(self.s2), "n": list(self.n),
                "fluxon": list(self.fluxon), "path_c": self.path_c.vertices.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "InterferometerGeometry":
        path = d.get("path_c")
        return cls(tuple(d["s1"]), tuple(d["s2"]), tuple(d["n"]),
                   tuple(d.get("fluxon", (0.0, 0.0))),
                   PathGeometry(path) if path is not None else None)


def andreev_local_phase(geom: InterferometerGeometry, cfg: ChargeFluxConfig,
                        units: UnitSystem | None = None, spec: QuadratureSpec | None = None,
                        check: bool = True, rel_tol: float = 1e-6) -> dict:
    """Local phase of the two-branch Andreev geometry from the subtended angle.

    With ``check`` the phase is also integrated over the numeric effective
    potential (fluxon placed at ``geom.fluxon``) and the two must agree to
    ``rel_tol``; otherwise AccuracyError is raised.
    """
    units = units or UnitSystem()
    dtheta = subtended_angle(geom.path_c, geom.fluxon)
    scale = cfg.e_star / (units.hbar * units.c)
    phi_loc = scale * cfg.Phi * dtheta / (2.0 * math.pi)
    out = {"delta_theta": dtheta, "phi_loc": phi_loc}
    if check:
        ncfg = ChargeFluxConfig(e=cfg.e, e_star=cfg.e_star, m=cfg.m, M=cfg.M, Phi=cfg.Phi,
                                x_a=cfg.x_a, x_b=geom.fluxon)
        # relative agreement, with a floor for paths subtending almost no angle
        ref = max(abs(phi_loc), 1e-9 * abs(scale * cfg.Phi))
        field_a = tabulated_a(ncfg, geom.path_c, spec, units)
        res = phase_along_path(field_a, geom.path_c, cfg.e_star, units,
                               tol=0.01 * rel_tol * ref / abs(scale))
        out["phi_loc_numeric"] = res.phase
        out["error_estimate"] = res.error_estimate
        if abs(res.phase - phi_loc) > rel_tol * ref:
            raise AccuracyError(f"numeric local phase {res.phase!r} disagrees with {phi_loc!r}",
                                res.phase, res.error_estimate)
    return out


def interference_signal(phi_loc, phi0=0.0):
    """Minimal fringe model cos(phi0 + phi_loc)."""
    return np.cos(np.add(phi0, phi_loc))


def semiclassical_gauge_shift(f: SemiclassicalField, path: PathGeometry, charge: float,
                              units: UnitSystem | None = None, tol: float = 1e-13) -> dict:
    """Path phase with and without grad chi and the gradient-theorem prediction."""
    units = units or UnitSystem()
    base = phase_along_path(f.base, path, charge, units, tol)
    gauged = phase_along_path(f, path, charge, units, tol)
    ends = f.chi_value(np.array([path.start, path.end]))
    predicted = charge / (units.hbar * units.c) * (float(ends[1]) - float(ends[0]))
    if path.closed:
        predicted = 0.0
    return {"phase_base": base.phase, "phase_gauged": gauged.phase,
            "difference": gauged.phase - base.phase, "predicted_difference": predicted,
            "error_estimate": base.error_estimate + gauged.error_estimate}


def _closing_loop(path: PathGeometry, fluxon) -> PathGeometry:
    """Close an open path through points on the far side of the fluxon."""
    if path.closed:
        return path
    f = np.asarray(fluxon, dtype=float)
    rel = path.vertices - f
    radius = 1.25 * float(np.max(np.hypot(rel[:, 0], rel[:, 1])))
    ang_end = math.atan2(*(path.end - f)[::-1])
    ang_start = math.atan2(*(path.start - f)[::-1])
    # go out radially, round the remaining angle, and back in
    sweep = (ang_start - ang_end) % (2.0 * math.pi)
    th = ang_end + sweep * np.arange(9) / 8
    arc = f + radius * np.column_stack([np.cos(th), np.sin(th)])
    v = np.vstack([path.vertices, arc, path.start[None, :]])
    return PathGeometry(v, closed=True)


def qed_vs_semiclassical_report(geom: InterferometerGeometry, gauges: Sequence[GaugeSpec],
                                cfg: ChargeFluxConfig, spec: QuadratureSpec | None = None,
                                units: UnitSystem | None = None,
                                loop: PathGeometry | None = None) -> dict:
    """Open-path and closed-loop phases from QED and semiclassical fields.

    QED rows integrate a + da for each gauge family (da on a grid covering
    the geometry).  Semiclassical rows integrate base + grad chi for each
    gauge's chi.  ``loop`` defaults to path C closed around the far side
    of the fluxon.
    """
    spec = spec or QuadratureSpec()
    units = units or UnitSystem()
    gauges = list(gauges)
    loop = loop or _closing_loop(geom.path_c, geom.fluxon)
    charge = cfg.e_star
    ncfg = ChargeFluxConfig(e=cfg.e, e_star=cfg.e_star, m=cfg.m, M=cfg.M, Phi=cfg.Phi,
                            x_a=cfg.x_a, x_b=geom.fluxon)
    dtheta = subtended_angle(geom.path_c, geom.fluxon)
    expected = charge * cfg.Phi * dtheta / (2.0 * math.pi * units.hbar * units.c)
    topo = charge * cfg.Phi / (units.hbar * units.c) * winding_number(loop, geom.fluxon)
    f_rel = np.vstack([geom.path_c.vertices, loop.vertices]) - np.asarray(geom.fluxon)
    r_max = float(np.max(np.hypot(f_rel[:, 0], f_rel[:, 1])))

    base = AnalyticAField(cfg.Phi, geom.fluxon, spec.r_min)
    numeric = tabulated_a(ncfg, geom.path_c, spec, units)
    qed_base_open = phase_along_path(numeric, geom.path_c, charge, units, tol=1e-9)
    qed_base_loop = phase_along_path(base, loop, charge, units)
    qed_rows = []
    for g in gauges:
        if g.amplitude == 0:
            da_open = da_loop = 0.0
        else:
            da = DeltaAField(g, ncfg, r_max, spec, units)
            da_open = phase_along_path(da, geom.path_c, charge, units, tol=1e-11).phase
            da_loop = phase_along_path(da, loop, charge, units, tol=1e-11).phase
        qed_rows.append({"family": g.family, "gauge": g.to_dict(),
                         "phi_open": qed_base_open.phase + da_open,
                         "phi_open_error": qed_base_open.error_estimate,
                         "delta_open": da_open,
                         "phi_loop": qed_base_loop.phase + da_loop, "delta_loop": da_loop})
    semi_rows = []
    for g in gauges:
        sf = SemiclassicalField(cfg.Phi, geom.fluxon, g.chi, spec.r_min)
        shift = semiclassical_gauge_shift(sf, geom.path_c, charge, units)
        closed = phase_along_path(sf, loop, charge, units)
        semi_rows.append({"chi": [p.to_dict() for p in g.chi],
                          "phi_open": shift["phase_gauged"],
                          "difference": shift["difference"],
                          "predicted_difference": shift["predicted_difference"],
                          "phi_loop": closed.phase})
    diffs = [abs(r["predicted_difference"]) for r in semi_rows]
    return {"delta_theta": dtheta, "phi_loc_expected": expected, "phi_loop_expected": topo,
            "winding": winding_number(loop, geom.fluxon),
            "qed": qed_rows, "semiclassical": semi_rows,
            "semiclassical_spread": max(diffs, default=0.0)}
