"""Config-driven experiment runner.

    stasis run <config.cfg> [--plot] [--jobs N] [--out DIR]
    stasis catalog

Configs are flat INI files (sections: experiment, amplitude, phase, grid,
tolerances, output).  Results are written atomically as CSV with 17
significant digits, so identical configs reproduce byte-identical files;
exit code 0 means every row passed, 2 means some row failed, 1 means the
configuration or the computation errored out.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import catalog
from .errors import BudgetError, ConvergenceError, DomainError
from .expansion import ExpansionConfig, expand_integral
from .oracle import integrate_oscillatory
from .quadratic import QuadraticPhase, expand_quadratic, resolve_delta
from .schrodinger import (SchrodingerSetup, curve_coefficients, curve_point,
                          evaluate_solution, fit_decay, integrate_quadratic,
                          predicted_exponents, region_contains, supremum_scan,
                          threshold_time)

KINDS = ("expand", "sweep-omega", "schrodinger-curve", "schrodinger-region",
         "critical-direction", "blowup-scan")


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _getfloat(cfg, section, key, default=None):
    try:
        raw = cfg.get(section, key, fallback=None)
        if raw is None or raw.strip() == "":
            if default is None:
                raise ConfigError(f"missing required key [{section}] {key}")
            return default
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid number for key [{section}] {key}") from exc


def _getint(cfg, section, key, default=None):
    return int(round(_getfloat(cfg, section, key, default)))


def _load_config(path):
    cfg = configparser.ConfigParser()
    read = cfg.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    kind = cfg.get("experiment", "kind", fallback=None)
    if kind not in KINDS:
        raise ConfigError(f"key [experiment] kind must be one of {KINDS}, got {kind!r}")
    return cfg, kind


def _amplitude_from(cfg):
    name = cfg.get("amplitude", "name", fallback=None)
    if name is None:
        raise ConfigError("missing required key [amplitude] name")
    params = {}
    for key in ("mu", "mu1", "mu2"):
        if cfg.has_option("amplitude", key):
            params[key] = _getfloat(cfg, "amplitude", key)
    try:
        return catalog.amplitude(name, **params)
    except TypeError as exc:
        raise ConfigError(f"amplitude {name!r} rejects parameters {params}") from exc
    except DomainError as exc:
        raise ConfigError(f"key [amplitude] name: {exc}") from exc


def _omega_grid(cfg):
    lo = _getfloat(cfg, "grid", "omega_min")
    hi = _getfloat(cfg, "grid", "omega_max")
    n = _getint(cfg, "grid", "omega_count")
    if not (0 < lo <= hi and n >= 1):
        raise ConfigError("keys [grid] omega_min/omega_max/omega_count malformed")
    return np.geomspace(lo, hi, n)


def _t_grid(cfg):
    lo = _getfloat(cfg, "grid", "t_min")
    hi = _getfloat(cfg, "grid", "t_max")
    n = _getint(cfg, "grid", "t_count")
    if not (0 < lo <= hi and n >= 8):
        raise ConfigError("keys [grid] t_min/t_max/t_count malformed (need >= 8)")
    return np.geomspace(lo, hi, n)


def _setup_from(cfg):
    amp = _amplitude_from(cfg)
    if amp.mu2 != 1.0:
        raise ConfigError("schrodinger experiments need an amplitude with mu2 = 1")
    return SchrodingerSetup(amp=amp, p1=amp.p1, p2=amp.p2, mu=amp.mu1)


def _check_eps(cfg, mu):
    eps = _getfloat(cfg, "grid", "eps")
    delta = _getfloat(cfg, "grid", "delta", 0.0) or resolve_delta(mu, eps)
    if not 0.0 < eps < delta - 0.5:
        raise ConfigError(
            f"key [grid] eps: eps={eps} must lie in the open interval "
            f"(0, delta - 1/2) = (0, {delta - 0.5})")
    return eps, delta


# ---------------------------------------------------------------------------
# experiment kinds (module level so --jobs workers can pickle their tasks)
# ---------------------------------------------------------------------------

def _sweep_task(args):
    path, omega = args
    cfg, _ = _load_config(path)
    amp = _amplitude_from(cfg)
    tol = _getfloat(cfg, "tolerances", "oracle_tol", 1e-9)
    q = _getfloat(cfg, "grid", "q", 0.5)
    phase_name = cfg.get("phase", "name", fallback=None)
    if phase_name == "quadratic":
        p0 = _getfloat(cfg, "phase", "p0")
        c = _getfloat(cfg, "phase", "c", 0.0)
        qp = QuadraticPhase(p0=p0, c=c, p1=amp.p1, p2=amp.p2)
        res = expand_quadratic(amp, qp, omega)
        ov = integrate_quadratic(amp, qp, omega, tol)
    else:
        ph = catalog.phase(phase_name)
        res = expand_integral(ph, amp, q, ExpansionConfig(), omega)
        ov = integrate_oscillatory(ph, amp, omega, tol)
    lead = res.leading_sum()
    resid = abs(ov.value - lead)
    bound = res.total_bound()
    cert = res.total_bound(certified_only=True)
    return (omega, q, ov.value.real, ov.value.imag, lead.real, lead.imag,
            resid, bound, cert, resid <= bound)


def _run_sweep(cfg, path, jobs):
    omegas = _omega_grid(cfg)
    rows = _pmap(_sweep_task, [(path, float(w)) for w in omegas], jobs)
    header = ["omega", "q", "oracle_re", "oracle_im", "lead_re", "lead_im",
              "residual_abs", "bound_total", "bound_certified", "pass"]
    return header, rows, [r[-1] for r in rows]


def _run_expand(cfg, path):
    amp = _amplitude_from(cfg)
    omega = _getfloat(cfg, "grid", "omega")
    q = _getfloat(cfg, "grid", "q", 0.5)
    phase_name = cfg.get("phase", "name", fallback=None)
    if phase_name == "quadratic":
        p0 = _getfloat(cfg, "phase", "p0")
        c = _getfloat(cfg, "phase", "c", 0.0)
        qp = QuadraticPhase(p0=p0, c=c, p1=amp.p1, p2=amp.p2)
        res = expand_quadratic(amp, qp, omega)
    else:
        res = expand_integral(catalog.phase(phase_name), amp, q,
                              ExpansionConfig(), omega)
    rows = []
    for i, (coeff, exp) in enumerate(res.leading, 1):
        rows.append((f"lead_{i}", coeff.real, coeff.imag, exp, 0.0, False,
                     abs(coeff) * omega ** exp, True))
    for bt in res.bound_terms:
        rows.append((bt.origin, abs(bt.coeff), 0.0, -bt.omega_exp, bt.gap_exp,
                     bt.non_certified, bt.value(omega, res.gap), True))
    header = ["term", "coeff_re_or_abs", "coeff_im", "omega_exp", "gap_exp",
              "non_certified", "value_at_omega", "pass"]
    return header, rows, [True]


def _curve_task(args):
    path, t = args
    cfg, _ = _load_config(path)
    setup = _setup_from(cfg)
    eps, _ = _check_eps(cfg, setup.mu)
    tol = _getfloat(cfg, "tolerances", "oracle_tol", 1e-9)
    predicted, case = predicted_exponents(setup.mu, eps)
    _, x = curve_point(setup, eps, t)
    u = evaluate_solution(setup, t, x, tol)
    h, k = curve_coefficients(setup, eps, t)
    lead = {"mu>1/2": h, "mu<1/2": k, "mu=1/2": h + k}[case] * t ** predicted
    return (t, x, abs(u), abs(lead), abs(u - lead))


def _run_curve(cfg, path, jobs):
    setup = _setup_from(cfg)
    eps, _ = _check_eps(cfg, setup.mu)
    slope_tol = _getfloat(cfg, "tolerances", "slope_tol", 0.05)
    margin = _getfloat(cfg, "tolerances", "residual_margin", 0.03)
    ts = _t_grid(cfg)
    t_min = max(1.0, threshold_time(setup, setup.p2, eps))
    if ts[0] <= t_min:
        raise ConfigError(f"key [grid] t_min: must exceed {t_min}")
    data = _pmap(_curve_task, [(path, float(t)) for t in ts], jobs)
    predicted, _ = predicted_exponents(setup.mu, eps)
    lead_fit = fit_decay([(r[0], r[2]) for r in data])
    resid_fit = fit_decay([(r[0], r[4]) for r in data])
    ok = (abs(lead_fit.slope - predicted) <= slope_tol
          and resid_fit.slope <= lead_fit.slope - margin)
    rows = [r + (lead_fit.slope, predicted, resid_fit.slope, ok) for r in data]
    header = ["t", "x", "u_abs", "lead_abs", "residual_abs",
              "fitted_slope", "predicted_exp", "residual_slope", "pass"]
    return header, rows, [ok]


def _region_task(args):
    path, t, frac = args
    cfg, _ = _load_config(path)
    setup = _setup_from(cfg)
    eps, _ = _check_eps(cfg, setup.mu)
    tol = _getfloat(cfg, "tolerances", "oracle_tol", 1e-9)
    predicted, _ = predicted_exponents(setup.mu, eps)
    p_curve = setup.p1 + t ** (-eps)
    if frac == 0.0:
        _, x = curve_point(setup, eps, t)
    else:
        x = 2.0 * (p_curve + frac * (setup.p2 - p_curve)) * t
    if frac > 0.0 and not region_contains(setup, eps, t, x):
        return None
    u = abs(evaluate_solution(setup, t, x, tol))
    return (t, x, frac, u, u / t ** predicted)


def _run_region(cfg, path, jobs):
    setup = _setup_from(cfg)
    eps, _ = _check_eps(cfg, setup.mu)
    ts = _t_grid(cfg)
    n_rays = _getint(cfg, "grid", "rays", 10)
    factor = _getfloat(cfg, "tolerances", "region_factor", 3.0)
    tasks = []
    for t in ts:
        for i in range(n_rays + 1):
            tasks.append((path, float(t), i / (n_rays + 1.0)))
    data = [r for r in _pmap(_region_task, tasks, jobs) if r is not None]
    boundary_sup = max(r[4] for r in data if r[2] == 0.0)
    rows = []
    oks = []
    for r in data:
        ok = r[4] <= factor * boundary_sup
        rows.append(r + (boundary_sup, ok))
        oks.append(ok)
    header = ["t", "x", "ray_frac", "u_abs", "scaled", "boundary_sup", "pass"]
    return header, rows, oks


def _critical_task(args):
    path, t = args
    cfg, _ = _load_config(path)
    setup = _setup_from(cfg)
    tol = _getfloat(cfg, "tolerances", "oracle_tol", 1e-9)
    x = 2.0 * setup.p1 * t
    return (t, x, abs(evaluate_solution(setup, t, x, tol)))


def _run_critical(cfg, path, jobs):
    setup = _setup_from(cfg)
    slope_tol = _getfloat(cfg, "tolerances", "slope_tol", 0.05)
    ts = _t_grid(cfg)
    data = _pmap(_critical_task, [(path, float(t)) for t in ts], jobs)
    fit = fit_decay([(r[0], r[2]) for r in data])
    predicted = -setup.mu / 2.0
    ok = abs(fit.slope - predicted) <= slope_tol
    rows = [r + (fit.slope, predicted, ok) for r in data]
    header = ["t", "x", "u_abs", "fitted_slope", "predicted_exp", "pass"]
    return header, rows, [ok]


def _blowup_task(args):
    path, t = args
    cfg, _ = _load_config(path)
    setup = _setup_from(cfg)
    n_x = _getint(cfg, "grid", "x_count", 81)
    sup_scaled, arg_x = supremum_scan(setup, t, n_x=n_x)
    return (t, sup_scaled, arg_x)


def _run_blowup(cfg, path, jobs):
    ts = _t_grid(cfg)
    data = _pmap(_blowup_task, [(path, float(t)) for t in ts], jobs)
    # exploratory: the scan reports sup |u| t^(mu/2); never asserted
    rows = [r + (True,) for r in data]
    header = ["t", "sup_u_scaled", "argmax_x", "pass"]
    return header, rows, [True]


def _pmap(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _svg_text(header, rows, xcol=0, ycols=(2,)):
    """Minimal deterministic log-log SVG plot of chosen columns."""
    width, height, pad = 640, 480, 60
    xs = np.array([float(r[xcol]) for r in rows])
    series = []
    for yc in ycols:
        ys = np.array([max(float(r[yc]), 1e-300) for r in rows])
        series.append(ys)
    lx = np.log10(xs)
    lys = [np.log10(y) for y in series]
    x0, x1 = float(lx.min()), float(lx.max())
    y0 = min(float(l.min()) for l in lys)
    y1 = max(float(l.max()) for l in lys)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
             f'y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
             f'stroke="black"/>']
    for dec in range(math.ceil(x0), math.floor(x1) + 1):
        parts.append(f'<text x="{sx(dec):.1f}" y="{height - pad + 18}" '
                     f'font-size="11" text-anchor="middle">1e{dec}</text>')
    for dec in range(math.ceil(y0), math.floor(y1) + 1):
        parts.append(f'<text x="{pad - 8}" y="{sy(dec):.1f}" font-size="11" '
                     f'text-anchor="end">1e{dec}</text>')
    colors = ("#1f77b4", "#d62728", "#2ca02c")
    for i, ly in enumerate(lys):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(lx, ly))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{colors[i % 3]}" stroke-width="1.5"/>')
    parts.append(f'<text x="{width / 2:.0f}" y="{height - 16}" font-size="12" '
                 f'text-anchor="middle">{header[xcol]} (log10)</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def catalog_list() -> str:
    return catalog.listing()


def run(config_path: str, plot: bool = False, jobs: int = 1,
        out_dir: str = ".") -> int:
    """Execute one experiment config; returns the process exit code."""
    try:
        cfg, kind = _load_config(config_path)
        if kind == "sweep-omega":
            header, rows, oks = _run_sweep(cfg, config_path, jobs)
        elif kind == "expand":
            header, rows, oks = _run_expand(cfg, config_path)
        elif kind == "schrodinger-curve":
            header, rows, oks = _run_curve(cfg, config_path, jobs)
        elif kind == "schrodinger-region":
            header, rows, oks = _run_region(cfg, config_path, jobs)
        elif kind == "critical-direction":
            header, rows, oks = _run_critical(cfg, config_path, jobs)
        else:
            header, rows, oks = _run_blowup(cfg, config_path, jobs)
        csv_name = cfg.get("output", "csv", fallback=None)
        if csv_name is None:
            raise ConfigError("missing required key [output] csv")
        csv_path = os.path.join(out_dir, csv_name)
        _write_atomic(csv_path, _csv_text(header, rows))
        if plot:
            svg_name = cfg.get("output", "svg", fallback=None)
            if svg_name:
                ycols = (2,) if kind != "sweep-omega" else (6, 7)
                _write_atomic(os.path.join(out_dir, svg_name),
                              _svg_text(header, rows, 0, ycols))
        print(f"{kind}: {sum(bool(o) for o in oks)}/{len(oks)} pass -> {csv_path}")
        return 0 if all(oks) else 2
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (BudgetError, ConvergenceError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="stasis",
                                     description="stationary-phase expansion "
                                     "experiments with certified bounds")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--plot", action="store_true")
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--out", default=".")
    sub.add_parser("catalog", help="list built-in amplitudes and phases")
    args = parser.parse_args(argv)
    if args.command == "catalog":
        print(catalog_list())
        return 0
    return run(args.config, plot=args.plot, jobs=args.jobs, out_dir=args.out)


if __name__ == "__main__":
    sys.exit(main())
