"""Command-line front end.

    abqed <subcommand> --config FILE [--out FILE] [--format csv|json] [--seed N] [key=value ...]

The config is a single YAML or JSON document.  Trailing ``key=value``
overrides use dotted keys (``charge_flux.Phi=3.14``) and take precedence
over the file; ``--out``, ``--format`` and ``--seed`` take precedence over
everything.  Every output embeds the resolved config and tool version, and
contains nothing that varies between runs with the same inputs.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from . import __version__
from .core import ChargeFluxConfig, CurrentLoop, PathGeometry, UnitSystem, circle, \
    subtended_angle, winding_number
from .errors import AbqedError, AccuracyError, ConfigError, DomainError
from .interaction import (analytic_a, coulomb_gauge_comparison, coulomb_kernel, delta_a,
                          effective_a, effective_a_direct)
from .modes import (GAUGE_FAMILIES, TRANSVERSE, GaugeSpec, PhotonMode, random_gauge,
                    stokes_check)
from .phases import (AnalyticAField, DeltaAField, InterferometerGeometry,
                     SemiclassicalField, andreev_local_phase, interference_signal,
                     phase_along_path, qed_vs_semiclassical_report, tabulated_a)
from .quadrature import QuadratureSpec

TOOL = "abqed"
SUBCOMMANDS = ("eff-a", "gauge-check", "coulomb", "phase", "interferometer", "stokes-check",
               "compare")

EXIT_OK, EXIT_ACCURACY, EXIT_CONFIG, EXIT_USAGE = 0, 2, 3, 64

# closed-loop phase residual allowed by gauge-check
LOOP_TOL = 1e-8
# gauge-check sample points relative to the fluxon
DEFAULT_POINTS = ((0.6, 0.8), (-1.1, 0.3), (0.2, -0.9), (-0.5, -0.7), (1.3, 0.4))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    """Resolved run configuration; ``raw`` is the dict echoed into outputs."""

    units: UnitSystem
    charge_flux: ChargeFluxConfig
    quadrature: QuadratureSpec
    gauge: GaugeSpec | None
    gauges: list[GaugeSpec]
    geometry: dict
    params: dict
    output: dict
    seed: int | None
    raw: dict = field(default_factory=dict)


def load_config_text(text: str) -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML/JSON: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def apply_override(cfg: dict, item: str) -> None:
    """Set a dotted key from ``key=value``; the value is parsed as YAML."""
    if "=" not in item:
        raise UsageError(f"override {item!r} is not key=value")
    key, text = item.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise UsageError(f"empty override key in {item!r}")
    node = cfg
    for p in parts[:-1]:
        nxt = node.get(p)
        if nxt is None:
            nxt = node[p] = {}
        if not isinstance(nxt, dict):
            raise ConfigError(f"override {key!r} descends into a non-mapping")
        node = nxt
    try:
        node[parts[-1]] = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"bad override value {text!r}") from exc


def _section(d: dict, name: str) -> dict:
    v = d.get(name) or {}
    if not isinstance(v, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return v


def resolve_config(data: dict) -> RunConfig:
    """Build typed objects and the fully resolved, echoable dict."""
    data = copy.deepcopy(data)
    known = {"units", "charge_flux", "quadrature", "gauge", "gauges", "geometry", "params",
             "output", "seed"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config sections {unknown}")
    try:
        units = UnitSystem(**_section(data, "units"))
        cf = _section(data, "charge_flux")
        charge_flux = ChargeFluxConfig(**{k: (tuple(v) if isinstance(v, list) else v)
                                          for k, v in cf.items()})
        quad = QuadratureSpec.from_dict(_section(data, "quadrature"))
        gauge = GaugeSpec.from_dict(data["gauge"]) if data.get("gauge") else None
        gauges_raw = data.get("gauges") or []
        if not isinstance(gauges_raw, list):
            raise ConfigError("gauges must be a list")
        gauges = [GaugeSpec.from_dict(g) for g in gauges_raw]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    seed = data.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError("seed must be an integer")
    output = _section(data, "output")
    fmt = output.get("format", "json")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")
    output = {"format": fmt, "path": output.get("path")}
    # the output path is not echoed, so the same run written to two files is byte-identical
    raw = {
        "units": asdict(units),
        "charge_flux": asdict(charge_flux),
        "quadrature": quad.to_dict(),
        "gauge": gauge.to_dict() if gauge else None,
        "gauges": [g.to_dict() for g in gauges],
        "geometry": _section(data, "geometry"),
        "params": _section(data, "params"),
        "output": {"format": fmt},
        "seed": seed,
    }
    raw["charge_flux"]["x_a"] = list(charge_flux.x_a)
    raw["charge_flux"]["x_b"] = list(charge_flux.x_b)
    return RunConfig(units, charge_flux, quad, gauge, gauges, raw["geometry"], raw["params"],
                     output, seed, raw)


def _rng(rc: RunConfig) -> np.random.Generator:
    if rc.seed is None:
        raise ConfigError("this subcommand draws random samples and needs an integer seed")
    return np.random.default_rng(rc.seed)


def _path(rc: RunConfig) -> PathGeometry:
    g = rc.geometry.get("path")
    if g is None:
        raise ConfigError("geometry.path is required")
    if isinstance(g, list):
        g = {"vertices": g}
    try:
        if "circle" in g:
            c = g["circle"]
            return circle(float(c.get("radius", 1.0)), tuple(c.get("center", (0.0, 0.0))),
                          int(c.get("n", 64)), int(c.get("turns", 1)))
        return PathGeometry(np.array(g["vertices"], dtype=float), bool(g.get("closed", False)),
                            float(g.get("refinement", math.inf)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad geometry.path: {exc}") from exc


def _interferometer(rc: RunConfig) -> InterferometerGeometry:
    g = rc.geometry.get("interferometer")
    if not isinstance(g, dict):
        raise ConfigError("geometry.interferometer is required")
    try:
        return InterferometerGeometry.from_dict(g)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad geometry.interferometer: {exc}") from exc


def _floats(v, name: str) -> list[float]:
    try:
        return [float(x) for x in v]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a list of numbers") from exc


def _charge(rc: RunConfig) -> float:
    which = rc.params.get("charge", "e_star")
    if which not in ("e", "e_star"):
        raise ConfigError("params.charge must be 'e' or 'e_star'")
    return rc.charge_flux.e if which == "e" else rc.charge_flux.e_star


# ---------------------------------------------------------------------------
# subcommands; each returns (rows, failures)

def run_eff_a(rc: RunConfig):
    rs = _floats(rc.params.get("r", [0.5, 1.0, 2.0]), "params.r")
    theta = float(rc.params.get("theta", 0.0))
    route = rc.params.get("route", "factored")
    if route not in ("factored", "direct"):
        raise ConfigError("params.route must be 'factored' or 'direct'")
    rows = []
    for r in rs:
        x = np.array([r * math.cos(theta), r * math.sin(theta)])
        fn = effective_a if route == "factored" else effective_a_direct
        res = fn(x, rc.charge_flux, rc.quadrature, rc.units)
        r_hat = x / r
        t_hat = np.array([-r_hat[1], r_hat[0]])
        exact = analytic_a(x, rc.charge_flux.Phi)
        rows.append({"r": r, "a_theta": float(res.value @ t_hat), "a_r": float(res.value @ r_hat),
                     "err": res.error_estimate, "a_theta_analytic": float(exact @ t_hat)})
    return rows, []


def gauge_check_loops(r_loop: float = 0.8) -> list[PathGeometry]:
    """Test loops: once around the fluxon, once clockwise, and one beside it."""
    return [circle(r_loop, n=8), circle(0.85 * r_loop, n=6, turns=-1, start=0.3),
            PathGeometry(np.array([[0.3, 0.2], [0.8, 0.25], [0.7, 0.7], [0.25, 0.6]])
                         * r_loop / 0.8,
                         closed=True)]


def run_gauge_check(rc: RunConfig):
    gauges = list(rc.gauges)
    if rc.gauge is not None:
        gauges.insert(0, rc.gauge)
    n_random = int(rc.params.get("random_per_family", 0 if gauges else 2))
    if n_random:
        rng = _rng(rc)
        for fam in GAUGE_FAMILIES:
            gauges += [random_gauge(rng, fam) for _ in range(n_random)]
    if not gauges:
        raise ConfigError("gauge-check needs gauges or params.random_per_family")
    pts = np.array(rc.params.get("points", DEFAULT_POINTS), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ConfigError("params.points must be a list of 2-vectors")
    loops = gauge_check_loops(float(rc.params.get("loop_radius", 0.8)))
    fluxon = np.asarray(rc.charge_flux.x_b)
    loops = [PathGeometry(lp.vertices + fluxon, closed=True) for lp in loops]
    r_max = max(float(np.max(np.hypot(*(lp.vertices - fluxon).T))) for lp in loops)
    charge = _charge(rc)
    rows, failures = [], []
    for i, g in enumerate(gauges):
        das = [delta_a(p, g, rc.charge_flux, rc.quadrature, rc.units) for p in pts]
        mags = [float(np.hypot(*d.value)) for d in das]
        errs = [d.error_estimate for d in das]
        if g.amplitude == 0:
            residuals = [0.0 for _ in loops]
        else:
            f = DeltaAField(g, rc.charge_flux, r_max, rc.quadrature, rc.units)
            residuals = [abs(phase_along_path(f, lp, charge, rc.units, tol=1e-10).phase)
                         for lp in loops]
        bound_ok = all(m <= 10.0 * e for m, e in zip(mags, errs))
        loop_ok = max(residuals) <= LOOP_TOL
        rows.append({"index": i, "family": g.family, "amplitude_re": g.amplitude.real,
                     "amplitude_im": g.amplitude.imag, "width": g.width,
                     "harmonic": g.harmonic, "max_delta_a": max(mags),
                     "max_error_estimate": max(errs), "max_loop_residual": max(residuals),
                     "delta_a_within_error": bound_ok, "loops_ok": loop_ok})
        if not loop_ok:
            failures.append(f"gauge {i} ({g.family}): loop residual {max(residuals):.3e}")
        if g.family == "real-isotropic" and not bound_ok:
            failures.append(f"gauge {i} (real-isotropic): |da| exceeds 10 x error estimate")
    return rows, failures


def run_coulomb(rc: RunConfig):
    rs = _floats(rc.params.get("r", np.geomspace(0.1, 10.0, 11).tolist()), "params.r")
    rows = []
    for r in rs:
        kernel = coulomb_kernel(r, rc.quadrature, rc.units)
        comp = coulomb_gauge_comparison(r, rc.quadrature, rc.units)
        rows.append({"r": r, "K": kernel.value, "rK": r * kernel.value,
                     "err": kernel.error_estimate,
                     "coulomb_gauge_kernel": comp["coulomb_gauge_kernel"],
                     "difference": comp["difference"]})
    return rows, []


def _field(rc: RunConfig, path: PathGeometry):
    kind = rc.params.get("field", "analytic")
    cf = rc.charge_flux
    if kind == "analytic":
        return AnalyticAField(cf.Phi, cf.x_b, rc.quadrature.r_min)
    if kind == "numeric":
        return tabulated_a(cf, path, rc.quadrature, rc.units)
    if kind == "semiclassical":
        chi = rc.gauge.chi if rc.gauge is not None else ()
        return SemiclassicalField(cf.Phi, cf.x_b, chi, rc.quadrature.r_min)
    raise ConfigError("params.field must be analytic, numeric or semiclassical")


def run_phase(rc: RunConfig):
    path = _path(rc)
    f = _field(rc, path)
    charge = _charge(rc)
    tol = float(rc.params.get("tol", 1e-13 if rc.params.get("field", "analytic") != "numeric"
                              else 1e-9))
    res = phase_along_path(f, path, charge, rc.units, tol=tol)
    dtheta = subtended_angle(path, rc.charge_flux.x_b)
    row = {"field": rc.params.get("field", "analytic"), "phase": res.phase,
           "integral": res.integral, "err": res.error_estimate, "delta_theta": dtheta,
           "expected": charge * rc.charge_flux.Phi * dtheta
           / (2.0 * math.pi * rc.units.hbar * rc.units.c),
           "winding": winding_number(path, rc.charge_flux.x_b) if path.closed else None}
    return [row], []


def run_interferometer(rc: RunConfig):
    geom = _interferometer(rc)
    sweep = rc.params.get("sweep", {"param": "fluxon_x", "values": [geom.fluxon[0]]})
    param = sweep.get("param", "fluxon_x")
    if param not in ("fluxon_x", "fluxon_y"):
        raise ConfigError("params.sweep.param must be fluxon_x or fluxon_y")
    phi0 = float(rc.params.get("phi0", 0.0))
    rows = []
    for v in _floats(sweep.get("values", []), "params.sweep.values"):
        fl = (v, geom.fluxon[1]) if param == "fluxon_x" else (geom.fluxon[0], v)
        g = InterferometerGeometry(geom.s1, geom.s2, geom.n, fl, geom.path_c)
        out = andreev_local_phase(g, rc.charge_flux, rc.units, rc.quadrature)
        rows.append({"sweep_param": v, "delta_theta": out["delta_theta"],
                     "phi_loc": out["phi_loc"], "phi_loc_numeric": out["phi_loc_numeric"],
                     "err": out["error_estimate"],
                     "signal": float(interference_signal(out["phi_loc"], phi0))})
    return rows, []


def random_stokes_case(rng: np.random.Generator, units: UnitSystem):
    """A random transverse mode and a random polygonal current loop."""
    kmag = rng.uniform(0.5, 3.0)
    phi = rng.uniform(0.0, 2.0 * math.pi)
    label = TRANSVERSE[int(rng.integers(0, 2))]
    mode = PhotonMode(np.array([kmag * math.cos(phi), kmag * math.sin(phi)]), label, units)
    n = int(rng.integers(5, 12))
    th = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
    rad = rng.uniform(0.5, 1.5, n)
    centre = rng.uniform(-1.0, 1.0, 2)
    verts = centre + np.column_stack([rad * np.cos(th), rad * np.sin(th)])
    return mode, CurrentLoop(float(rng.uniform(0.5, 2.0)), PathGeometry(verts, closed=True))


def observed_orders(steps, errors) -> list[float | None]:
    out: list[float | None] = [None]
    for (h0, e0), (h1, e1) in zip(zip(steps, errors), zip(steps[1:], errors[1:])):
        out.append(math.log(e0 / e1) / math.log(h0 / h1) if e0 > 0 and e1 > 0 else None)
    return out


def run_stokes_check(rc: RunConfig):
    rng = _rng(rc)
    n_cases = int(rc.params.get("cases", 5))
    steps = _floats(rc.params.get("steps", [0.04, 0.02, 0.01, 0.005, 0.0025]), "params.steps")
    rows, failures = [], []
    for i in range(n_cases):
        mode, loop = random_stokes_case(rng, rc.units)
        res = [stokes_check(mode, loop, h, rc.units, rc.quadrature.volume) for h in steps]
        orders = observed_orders(steps, [r.rel_error for r in res])
        for h, r, q in zip(steps, res, orders):
            rows.append({"case": i, "label": mode.label.value, "kx": float(mode.k[0]),
                         "ky": float(mode.k[1]), "current": loop.current, "step": h,
                         "line": r.line_integral, "surface": r.surface_integral,
                         "rel_error": r.rel_error, "vb_line": r.vb_line, "order": q})
        if res[-1].rel_error > 1e-6:
            failures.append(f"case {i}: finest rel_error {res[-1].rel_error:.3e}")
    return rows, failures


def run_compare(rc: RunConfig):
    geom = _interferometer(rc)
    gauges = list(rc.gauges) or ([rc.gauge] if rc.gauge else [])
    if not gauges:
        raise ConfigError("compare needs at least one gauge")
    rep = qed_vs_semiclassical_report(geom, gauges, rc.charge_flux, rc.quadrature, rc.units)
    rows = []
    for i, q in enumerate(rep["qed"]):
        rows.append({"source": "qed", "index": i, "family": q["family"],
                     "phi_open": q["phi_open"], "phi_loop": q["phi_loop"],
                     "difference": q["delta_open"], "predicted_difference": None,
                     "phi_loc_expected": rep["phi_loc_expected"],
                     "phi_loop_expected": rep["phi_loop_expected"]})
    for i, s in enumerate(rep["semiclassical"]):
        rows.append({"source": "semiclassical", "index": i, "family": gauges[i].family,
                     "phi_open": s["phi_open"], "phi_loop": s["phi_loop"],
                     "difference": s["difference"],
                     "predicted_difference": s["predicted_difference"],
                     "phi_loc_expected": rep["phi_loc_expected"],
                     "phi_loop_expected": rep["phi_loop_expected"]})
    return rows, []


RUNNERS = {"eff-a": run_eff_a, "gauge-check": run_gauge_check, "coulomb": run_coulomb,
           "phase": run_phase, "interferometer": run_interferometer,
           "stokes-check": run_stokes_check, "compare": run_compare}


# ---------------------------------------------------------------------------
# emission

def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    return v


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(subcommand: str, rc: RunConfig, rows: list[dict], fmt: str) -> str:
    config = _plain(rc.raw)
    rows = [_plain(r) for r in rows]
    if fmt == "json":
        doc = {"tool": TOOL, "version": __version__, "subcommand": subcommand,
               "seed": rc.seed, "config": config, "results": rows}
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool: {TOOL} {__version__}\n")
    buf.write(f"# subcommand: {subcommand}\n")
    buf.write(f"# config: {json.dumps(config, separators=(',', ':'))}\n")
    header = list(rows[0]) if rows else []
    w = csv.writer(buf, delimiter=",", lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r.get(h)) for h in header])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=TOOL, description="Charge-fluxon effective interaction experiments.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="YAML or JSON config file")
    p.add_argument("--out", help="output file (default: output.path or stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("overrides", nargs="*", help="dotted key=value config overrides")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_intermixed_args(argv)
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = load_config_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        for item in args.overrides:
            apply_override(data, item)
        if args.seed is not None:
            data["seed"] = args.seed
        out_sec = dict(data.get("output") or {})
        if args.format:
            out_sec["format"] = args.format
        if args.out:
            out_sec["path"] = args.out
        data["output"] = out_sec
        rc = resolve_config(data)
        rows, failures = RUNNERS[args.subcommand](rc)
        text = render(args.subcommand, rc, rows, rc.output["format"])
        if rc.output["path"]:
            with open(rc.output["path"], "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        if failures:
            for f in failures:
                stderr.write(f"{TOOL}: tolerance violation: {f}\n")
            return EXIT_ACCURACY
        return EXIT_OK
    except UsageError as exc:
        stderr.write(f"{TOOL}: usage error: {exc}\n")
        return EXIT_USAGE
    except AccuracyError as exc:
        stderr.write(f"{TOOL}: accuracy error: {exc}\n")
        return EXIT_ACCURACY
    except (ConfigError, DomainError) as exc:
        stderr.write(f"{TOOL}: config error: {exc}\n")
        return EXIT_CONFIG
    except AbqedError as exc:
        stderr.write(f"{TOOL}: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
