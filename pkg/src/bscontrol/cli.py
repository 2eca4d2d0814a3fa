"""Command-line front end: pricing, greeks, calibration, consistency, surfaces.

All computations are deterministic; identical invocations produce byte
identical output.  Options may also be read from a JSON config file
(--config); explicit flags override file values.  Error paths exit nonzero
with a JSON diagnostic on stderr (exit 2: validation, exit 3: infeasible
calibration target).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from .calibrate import (
    DEFAULT_N0,
    CalibrationTarget,
    NoBracketError,
    solve_lambda,
)
from .fdsolver import FdGrid, compare_surfaces, solve_heat_cn
from .greeks import delta_shift_surface, greeks_report
from .model import MarketParams, PhysicalPoint, derive_constants, to_heat
from .profiles import (
    ScaleSpec,
    heat_payoff,
    initial_condition_curve,
    l2_consistency,
    scaled_initial_data,
)
from .solution import (
    SCHEMA_VERSION,
    call_price,
    classical_heat,
    perturbed_heat,
    price_surface,
    surface_to_csv,
    surface_to_json,
)

_SCHEMA = {
    "schema_version": SCHEMA_VERSION,
    "surface_csv": "t,S,value",
    "curve_csv": "S,C0,C0_lambda",
    "consistency_csv": "lambda,deviation_sq,upper_bound",
    "json_reports": ["price", "greeks", "calibration", "validation"],
    "time_unit": "years (t-days flags divide by day-count)",
}

# Defaults for the consistency/validation study configuration.
_STUDY_DEFAULTS = {"r": 0.06, "sigma": 0.3, "E": 100.0, "T_days": 60.0}


def _fail(kind: str, code: int, **info) -> None:
    payload = {"error": kind, **info}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(code)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        _fail("bad-config", 2, message=str(exc), field="config")


def _pick(flag, cfg: dict, section: str, key: str, default=None):
    if flag is not None:
        return flag
    return cfg.get(section, {}).get(key, default)


def _build_market(cfg, r, sigma, strike, t_years, t_days, day_count, *, study_defaults=False):
    defaults = _STUDY_DEFAULTS if study_defaults else {}
    day_count = _pick(day_count, cfg, "market", "day_count", 365.0)
    r = _pick(r, cfg, "market", "r", defaults.get("r"))
    sigma = _pick(sigma, cfg, "market", "sigma", defaults.get("sigma"))
    strike = _pick(strike, cfg, "market", "E", defaults.get("E"))
    if t_years is None and t_days is None:
        t_years = cfg.get("market", {}).get("T_years")
        t_days = cfg.get("market", {}).get("T_days", defaults.get("T_days"))
    for name, val in (("r", r), ("sigma", sigma), ("E", strike)):
        if val is None:
            _fail("invalid-params", 2, field=name, message=f"missing required {name}")
    if t_years is None and t_days is None:
        _fail("invalid-params", 2, field="T", message="missing required maturity")
    maturity = float(t_years) if t_years is not None else float(t_days) / float(day_count)
    try:
        return MarketParams(
            r=float(r), sigma=float(sigma), strike=float(strike),
            maturity=maturity, day_count=float(day_count),
        )
    except ValueError as exc:
        _fail("invalid-params", 2, field=_offending_field(str(exc)), message=str(exc))


def _offending_field(message: str) -> str:
    return message.split()[0] if message else "unknown"


def _build_scale(cfg, lam, n0, eps) -> ScaleSpec | None:
    lam = _pick(lam, cfg, "scale", "lambda")
    n0 = _pick(n0, cfg, "scale", "n0", DEFAULT_N0)
    eps = _pick(eps, cfg, "scale", "eps", 1)
    if lam is None:
        return None
    try:
        return ScaleSpec(lam=float(lam), n0=int(n0), epsilon=int(eps))
    except ValueError as exc:
        _fail("invalid-params", 2, field="scale", message=str(exc))


def _resolve_t(t_years, t_days, params: MarketParams) -> float:
    if t_years is None and t_days is None:
        _fail("invalid-params", 2, field="t", message="missing required evaluation time")
    return float(t_years) if t_years is not None else float(t_days) / params.day_count


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _parse_grid(spec: str) -> np.ndarray:
    if ":" in spec:
        lo, hi, count = spec.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    return np.array([float(v) for v in spec.split(",")])


def _market_options(f):
    for opt in reversed([
        click.option("--r", type=float, default=None, help="Risk-free rate per year."),
        click.option("--sigma", type=float, default=None, help="Volatility per sqrt-year."),
        click.option("--E", "strike", type=float, default=None, help="Strike price."),
        click.option("--T-years", "t_years_mat", type=float, default=None,
                     help="Maturity in years."),
        click.option("--T-days", "t_days_mat", type=float, default=None,
                     help="Maturity in days (divided by day-count)."),
        click.option("--day-count", type=float, default=None,
                     help="Days-per-year divisor (default 365)."),
        click.option("--config", type=click.Path(), default=None,
                     help="JSON config file; flags override it."),
    ]):
        f = opt(f)
    return f


def _scale_options(f):
    for opt in reversed([
        click.option("--lambda", "lam", type=float, default=None,
                     help="Scale factor of the perturbation (> 1)."),
        click.option("--n0", type=int, default=None, help="Number of profiles (default 1)."),
        click.option("--eps", type=int, default=None, help="Perturbation sign, +1 or -1."),
    ]):
        f = opt(f)
    return f


def _print_schema(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(json.dumps(_SCHEMA, sort_keys=True))
    ctx.exit(0)


@click.group()
@click.option("--schema-version", is_flag=True, callback=_print_schema,
              expose_value=False, is_eager=True,
              help="Print the CSV/JSON output contract and exit.")
def main() -> None:
    """Shape-parameter control of Black-Scholes calls: pricing, greeks,
    calibration of the scale factor, consistency checks and surfaces."""


@main.command("price")
@_market_options
@_scale_options
@click.option("--S", "asset", type=float, default=None, help="Asset price.")
@click.option("--t-years", type=float, default=None, help="Evaluation time in years.")
@click.option("--t-days", type=float, default=None, help="Evaluation time in days.")
@click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
def cmd_price(r, sigma, strike, t_years_mat, t_days_mat, day_count, config,
              lam, n0, eps, asset, t_years, t_days, out):
    """Price a call (classical, or perturbed when --lambda is given)."""
    cfg = _load_config(config)
    params = _build_market(cfg, r, sigma, strike, t_years_mat, t_days_mat, day_count)
    spec = _build_scale(cfg, lam, n0, eps)
    asset = _pick(asset, cfg, "point", "S")
    if asset is None:
        _fail("invalid-params", 2, field="S", message="missing required S")
    t = _resolve_t(t_years, t_days, params)
    try:
        point = PhysicalPoint(S=float(asset), t=t)
        price = call_price(point, params, spec)
        h = to_heat(point, params)
    except ValueError as exc:
        _fail("invalid-params", 2, field=_offending_field(str(exc)), message=str(exc))
    c = derive_constants(params)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "price": price,
        "heat_coords": {"x": h.x, "tau": h.tau},
        "constants": {"k": c.k, "alpha": c.alpha, "beta": c.beta},
        "scale": None if spec is None else {"lambda": spec.lam, "n0": spec.n0,
                                            "epsilon": spec.epsilon},
    }
    _emit(json.dumps(payload, sort_keys=True), out)


@main.command("greeks")
@_market_options
@_scale_options
@click.option("--S", "asset", type=float, default=None, help="Asset price.")
@click.option("--t-years", type=float, default=None, help="Evaluation time in years.")
@click.option("--t-days", type=float, default=None, help="Evaluation time in days.")
@click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
def cmd_greeks(r, sigma, strike, t_years_mat, t_days_mat, day_count, config,
               lam, n0, eps, asset, t_years, t_days, out):
    """Report Delta/Gamma/Vega/Theta/Rho (classical or perturbed)."""
    cfg = _load_config(config)
    params = _build_market(cfg, r, sigma, strike, t_years_mat, t_days_mat, day_count)
    spec = _build_scale(cfg, lam, n0, eps)
    asset = _pick(asset, cfg, "point", "S")
    if asset is None:
        _fail("invalid-params", 2, field="S", message="missing required S")
    t = _resolve_t(t_years, t_days, params)
    try:
        report = greeks_report(PhysicalPoint(S=float(asset), t=t), params, spec)
    except ValueError as exc:
        _fail("invalid-params", 2, field=_offending_field(str(exc)), message=str(exc))
    _emit(report.to_json(), out)


@main.command("solve-lambda")
@_market_options
@click.option("--S", "asset", type=float, default=None, help="Reference asset price.")
@click.option("--t-years", type=float, default=None, help="Reference time in years.")
@click.option("--t-days", type=float, default=None, help="Reference time in days.")
@click.option("--target-shift", type=float, default=None,
              help="Absolute Delta shift to achieve.")
@click.option("--eta0", type=float, default=None,
              help="Relative shift: Delta = (1 + eps*eta0) Delta_classical.")
@click.option("--n0", type=int, default=None, help="Number of profiles (default 1).")
@click.option("--eps", type=int, default=None, help="Perturbation sign, +1 or -1.")
@click.option("--tol", type=float, default=1e-10, help="Shift residual tolerance.")
@click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
def cmd_solve_lambda(r, sigma, strike, t_years_mat, t_days_mat, day_count, config,
                     asset, t_years, t_days, target_shift, eta0, n0, eps, tol, out):
    """Calibrate the scale factor to a prescribed Delta shift."""
    cfg = _load_config(config)
    params = _build_market(cfg, r, sigma, strike, t_years_mat, t_days_mat, day_count)
    asset = _pick(asset, cfg, "point", "S")
    if asset is None:
        _fail("invalid-params", 2, field="S", message="missing required S")
    t = _resolve_t(t_years, t_days, params)
    target_shift = _pick(target_shift, cfg, "calibration", "target_shift")
    eta0 = _pick(eta0, cfg, "calibration", "eta0")
    n0 = int(_pick(n0, cfg, "calibration", "n0", DEFAULT_N0))
    eps = int(_pick(eps, cfg, "calibration", "eps", 1))
    if (target_shift is None) == (eta0 is None):
        _fail("invalid-params", 2, field="target",
              message="exactly one of --target-shift / --eta0 is required")
    mode, value = ("absolute", target_shift) if target_shift is not None else ("relative", eta0)
    try:
        target = CalibrationTarget(
            mode=mode, value=float(value), reference=PhysicalPoint(S=float(asset), t=t),
            params=params, n0=n0, epsilon=eps,
        )
        result = solve_lambda(target, tol=tol)
    except NoBracketError as exc:
        _fail("no-bracket", 3, message=str(exc),
              max_achievable_shift=exc.max_achievable, at_lambda=exc.at_lambda)
    except ValueError as exc:
        _fail("invalid-params", 2, field=_offending_field(str(exc)), message=str(exc))
    _emit(result.to_json(), out)


@main.command("consistency")
@_market_options
@click.option("--lambda-list", default="2,5,10,50,100",
              help="Comma-separated scale factors to test.")
@click.option("--n0", type=int, default=None, help="Number of profiles (default 1).")
@click.option("--s-max", type=float, default=200.0,
              help="Upper price bound: integration runs on x in [0, ln(s_max/E)].")
@click.option("--quad-tol", type=float, default=1e-10, help="Quadrature tolerance.")
@click.option("--curve-points", type=int, default=201,
              help="Samples per emitted initial-condition curve.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the summary CSV to a file.")
@click.option("--curves-dir", type=click.Path(), default=None,
              help="Directory for per-lambda curve CSVs (S,C0,C0_lambda).")
def cmd_consistency(r, sigma, strike, t_years_mat, t_days_mat, day_count, config,
                    lambda_list, n0, s_max, quad_tol, curve_points, out, curves_dir):
    """Initial-condition consistency: L2 deviations, bounds and curves."""
    cfg = _load_config(config)
    params = _build_market(cfg, r, sigma, strike, t_years_mat, t_days_mat, day_count,
                           study_defaults=True)
    n0 = int(_pick(n0, cfg, "scale", "n0", DEFAULT_N0))
    k = derive_constants(params).k
    if s_max <= params.strike:
        _fail("invalid-params", 2, field="s_max",
              message="s_max must exceed the strike")
    interval = (0.0, math.log(s_max / params.strike))
    try:
        lams = [float(v) for v in lambda_list.split(",")]
    except ValueError as exc:
        _fail("invalid-params", 2, field="lambda_list", message=str(exc))

    lines = ["lambda,deviation_sq,upper_bound"]
    for lam in lams:
        spec = ScaleSpec(lam=lam, n0=n0, epsilon=1)
        rep = l2_consistency(spec, k, interval, quad_tol)
        lines.append(f"{lam!r},{rep.deviation_sq!r},{rep.upper_bound!r}")
    _emit("\n".join(lines) + "\n", out)

    if curves_dir:
        directory = Path(curves_dir)
        directory.mkdir(parents=True, exist_ok=True)
        s_values = np.linspace(0.0, s_max, curve_points)
        for lam in lams:
            spec = ScaleSpec(lam=lam, n0=n0, epsilon=1)
            c0, c0_lam = initial_condition_curve(s_values, spec, params, k)
            rows = ["S,C0,C0_lambda"]
            rows += [f"{s!r},{a!r},{b!r}" for s, a, b in zip(s_values, c0, c0_lam)]
            (directory / f"initial_condition_lambda_{lam:g}.csv").write_text(
                "\n".join(rows) + "\n"
            )


@main.command("surface")
@_market_options
@_scale_options
@click.option("--s-grid", required=True,
              help="Asset grid, 'min:max:count' or comma list.")
@click.option("--t-grid", required=True,
              help="Time grid in years, 'min:max:count' or comma list.")
@click.option("--diff-delta", is_flag=True,
              help="Emit Delta - Delta_classical instead of prices (needs --lambda).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
def cmd_surface(r, sigma, strike, t_years_mat, t_days_mat, day_count, config,
                lam, n0, eps, s_grid, t_grid, diff_delta, fmt, out):
    """Emit a price surface, or the Delta-shift surface with --diff-delta."""
    cfg = _load_config(config)
    params = _build_market(cfg, r, sigma, strike, t_years_mat, t_days_mat, day_count)
    spec = _build_scale(cfg, lam, n0, eps)
    try:
        gs = _parse_grid(s_grid)
        gt = _parse_grid(t_grid)
    except ValueError as exc:
        _fail("invalid-params", 2, field="grid", message=str(exc))
    try:
        if diff_delta:
            if spec is None:
                _fail("invalid-params", 2, field="lambda",
                      message="--diff-delta requires --lambda")
            surface = delta_shift_surface(gs, gt, params, spec)
        else:
            surface = price_surface(gs, gt, params, spec)
    except ValueError as exc:
        _fail("invalid-params", 2, field=_offending_field(str(exc)), message=str(exc))
    _emit(surface_to_csv(surface) if fmt == "csv" else surface_to_json(surface), out)


@main.command("validate")
@_market_options
@_scale_options
@click.option("--nx", type=int, default=2001, help="Spatial nodes.")
@click.option("--n-tau", type=int, default=2000, help="Time steps.")
@click.option("--x-min", type=float, default=-6.0, help="Left truncation bound.")
@click.option("--x-max", type=float, default=6.0, help="Right truncation bound.")
@click.option("--trim", type=int, default=1, help="Nodes excluded at each boundary.")
@click.option("--level-stride", type=int, default=100,
              help="Compare every N-th time level (plus the final one).")
@click.option("--threshold", type=float, default=5e-3,
              help="Max-abs error bound for exit status 0.")
@click.option("--refine", type=int, default=0,
              help="Additional half-step refinement levels to report orders.")
@click.option("--initial", type=click.Choice(["payoff", "zero"]), default="payoff",
              help="Initial data: the transformed payoff, or zero (debug).")
@click.option("--out", type=click.Path(), default=None, help="Write output to a file.")
def cmd_validate(r, sigma, strike, t_years_mat, t_days_mat, day_count, config,
                 lam, n0, eps, nx, n_tau, x_min, x_max, trim, level_stride,
                 threshold, refine, initial, out):
    """Crank-Nicolson cross-check of the closed-form solutions."""
    cfg = _load_config(config)
    params = _build_market(cfg, r, sigma, strike, t_years_mat, t_days_mat, day_count,
                           study_defaults=True)
    spec = _build_scale(cfg, lam, n0, eps)
    k = derive_constants(params).k

    if initial == "zero":
        initial_fn = lambda x: 0.0
        analytic = lambda x, tau: 0.0
    elif spec is None:
        initial_fn = lambda x: heat_payoff(x, k)
        analytic = lambda x, tau: classical_heat(x, tau, k)
    else:
        initial_fn = lambda x: scaled_initial_data(x, spec, k)
        analytic = lambda x, tau: perturbed_heat(x, tau, spec, k)

    def run(nx_i: int, n_tau_i: int):
        grid = FdGrid(x_min=x_min, x_max=x_max, nx=nx_i, n_tau=n_tau_i,
                      tau_end=params.tau_max)
        sol = solve_heat_cn(
            initial_fn, grid,
            left_bc=lambda tau: analytic(x_min, tau),
            right_bc=lambda tau: analytic(x_max, tau),
        )
        levels = sorted(set(range(0, n_tau_i + 1, max(1, level_stride))) | {n_tau_i})
        return compare_surfaces(sol, analytic, trim=trim, levels=levels)

    reports = [run(nx, n_tau)]
    for lev in range(1, refine + 1):
        reports.append(run((nx - 1) * 2**lev + 1, n_tau * 2**lev))

    payload = {
        "schema_version": SCHEMA_VERSION,
        "threshold": threshold,
        "levels": [
            {"nx": (nx - 1) * 2**i + 1, "n_tau": n_tau * 2**i,
             "max_abs": rep.max_abs, "rms": rep.rms,
             "at": {"tau": rep.at_tau, "x": rep.at_x}}
            for i, rep in enumerate(reports)
        ],
        "orders": [
            math.log2(reports[i].max_abs / reports[i + 1].max_abs)
            if reports[i + 1].max_abs > 0.0 else None
            for i in range(len(reports) - 1)
        ],
        "passed": reports[0].max_abs <= threshold,
    }
    _emit(json.dumps(payload, sort_keys=True), out)
    if not payload["passed"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
