"""Closed-form solutions of the transformed problem and price surfaces.

The classical solution of u_tau = u_xx with the transformed call payoff is

    u(x, tau) = e^((k+1)x/2 + (k+1)^2 tau/4) N(x/sqrt(2 tau) + (k+1) sqrt(tau/2))
              - e^((k-1)x/2 + (k-1)^2 tau/4) N(x/sqrt(2 tau) + (k-1) sqrt(tau/2)),

which back-transforms to the standard call premium S N(d1) - E e^(-r(T-t)) N(d2).
Because the heat equation is linear and scale invariant, the solution for the
perturbed initial data is the exact superposition

    u_lam(x, tau) = u(x, tau) + eps sum_{j=1..n0} lam^-j u(x/lam^j, tau/lam^2j).

`perturbed_heat_erfc` evaluates the same object through per-profile erfc
terms assembled directly; the two routes agree to roundoff and are tested
against each other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    MarketParams,
    PhysicalPoint,
    derive_constants,
    heat_value_to_price,
    to_heat,
)
from .profiles import ScaleSpec, heat_payoff
from .specfun import erfc, norm_cdf

__all__ = [
    "DegenerateTimeError",
    "SolutionSurface",
    "classical_heat",
    "perturbed_heat",
    "perturbed_heat_erfc",
    "call_price",
    "price_surface",
    "surface_to_csv",
    "surface_to_json",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = "1"


class DegenerateTimeError(ValueError):
    """The erfc-form evaluation needs tau > 0 (the kernel degenerates at 0)."""


def classical_heat(x: float, tau: float, k: float) -> float:
    """Classical heat-space solution; dispatches to the payoff at tau = 0."""
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if tau == 0.0:
        return heat_payoff(x, k)
    inv = 1.0 / math.sqrt(2.0 * tau)
    half = math.sqrt(0.5 * tau)
    ap = x * inv + (k + 1.0) * half
    am = x * inv + (k - 1.0) * half
    ep = 0.5 * (k + 1.0) * x + 0.25 * (k + 1.0) ** 2 * tau
    em = 0.5 * (k - 1.0) * x + 0.25 * (k - 1.0) ** 2 * tau
    return math.exp(ep) * norm_cdf(ap) - math.exp(em) * norm_cdf(am)


def perturbed_heat(x: float, tau: float, spec: ScaleSpec, k: float) -> float:
    """Exact solution for the perturbed initial data, via the scaling identity."""
    lam = spec.lam
    acc = 0.0
    for j in range(1, spec.n0 + 1):
        acc += lam ** (-j) * classical_heat(x / lam**j, tau / lam ** (2 * j), k)
    return classical_heat(x, tau, k) + spec.epsilon * acc


def _erfc_profile_term(x: float, tau: float, k: float, scale: float) -> float:
    # (1/scale) * classical solution at (x/scale, tau/scale^2), written with
    # erfc directly: the completed square forces the argument
    # -x/(2 sqrt(tau)) - (k +- 1) sqrt(tau) / (2 scale).
    s = math.sqrt(tau)
    base = -0.5 * x / s
    ep = 0.5 * (k + 1.0) * x / scale + 0.25 * (k + 1.0) ** 2 * tau / (scale * scale)
    em = 0.5 * (k - 1.0) * x / scale + 0.25 * (k - 1.0) ** 2 * tau / (scale * scale)
    term_p = math.exp(ep) * erfc(base - 0.5 * (k + 1.0) * s / scale)
    term_m = math.exp(em) * erfc(base - 0.5 * (k - 1.0) * s / scale)
    return 0.5 * (term_p - term_m) / scale


def perturbed_heat_erfc(x: float, tau: float, spec: ScaleSpec, k: float) -> float:
    """Erfc-form evaluation of the perturbed solution; requires tau > 0."""
    if tau <= 0.0:
        raise DegenerateTimeError(f"tau must be > 0 for the erfc form, got {tau}")
    lam = spec.lam
    acc = 0.0
    for j in range(1, spec.n0 + 1):
        acc += _erfc_profile_term(x, tau, k, lam**j)
    return _erfc_profile_term(x, tau, k, 1.0) + spec.epsilon * acc


def call_price(
    p: PhysicalPoint, params: MarketParams, spec: ScaleSpec | None = None
) -> float:
    """Call premium at a physical point; the standard closed form when `spec`
    is absent, the exact perturbed price otherwise."""
    h = to_heat(p, params)
    c = derive_constants(params)
    if spec is None:
        u = classical_heat(h.x, h.tau, c.k)
    else:
        u = perturbed_heat(h.x, h.tau, spec, c.k)
    return heat_value_to_price(h, u, params)


@dataclass(frozen=True)
class SolutionSurface:
    """Values on an (S, t) grid, row-major over (t, S), with its metadata."""

    grid_s: np.ndarray
    grid_t: np.ndarray
    values: np.ndarray
    params: MarketParams
    spec: ScaleSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid_s", np.asarray(self.grid_s, dtype=float))
        object.__setattr__(self, "grid_t", np.asarray(self.grid_t, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.shape != (self.grid_t.size, self.grid_s.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match grids "
                f"({self.grid_t.size}, {self.grid_s.size})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("surface values must be finite")


def _check_grids(grid_s: np.ndarray, grid_t: np.ndarray, params: MarketParams) -> None:
    if grid_s.size == 0 or grid_t.size == 0:
        raise ValueError("grids must be non-empty")
    if np.any(np.diff(grid_s) <= 0.0) or np.any(np.diff(grid_t) < 0.0):
        raise ValueError("grids must be ascending")
    if grid_s[0] <= 0.0:
        raise ValueError(f"asset grid must be > 0, got min {grid_s[0]}")
    if grid_t[0] < 0.0 or grid_t[-1] > params.maturity:
        raise ValueError(
            f"time grid must lie in [0, {params.maturity}], got "
            f"[{grid_t[0]}, {grid_t[-1]}]"
        )


def price_surface(
    grid_s,
    grid_t,
    params: MarketParams,
    spec: ScaleSpec | None = None,
) -> SolutionSurface:
    """Evaluate `call_price` on the tensor grid; deterministic, node by node."""
    gs = np.asarray(grid_s, dtype=float)
    gt = np.asarray(grid_t, dtype=float)
    _check_grids(gs, gt, params)
    values = np.empty((gt.size, gs.size))
    for i, t in enumerate(gt):
        for j, s in enumerate(gs):
            values[i, j] = call_price(PhysicalPoint(S=s, t=t), params, spec)
    return SolutionSurface(grid_s=gs, grid_t=gt, values=values, params=params, spec=spec)


def surface_to_csv(surface: SolutionSurface) -> str:
    """Serialize a surface as CSV with header t,S,value (row-major over t, S)."""
    lines = ["t,S,value"]
    for i, t in enumerate(surface.grid_t):
        for j, s in enumerate(surface.grid_s):
            lines.append(f"{t!r},{s!r},{surface.values[i, j]!r}")
    return "\n".join(lines) + "\n"


def _params_dict(params: MarketParams) -> dict:
    return {
        "r": params.r,
        "sigma": params.sigma,
        "strike": params.strike,
        "maturity_years": params.maturity,
        "day_count": params.day_count,
    }


def _spec_dict(spec: ScaleSpec | None) -> dict | None:
    if spec is None:
        return None
    return {"lambda": spec.lam, "n0": spec.n0, "epsilon": spec.epsilon}


def surface_to_json(surface: SolutionSurface) -> str:
    """JSON envelope carrying the grids, values and problem metadata."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "params": _params_dict(surface.params),
        "scale": _spec_dict(surface.spec),
        "grid_s": surface.grid_s.tolist(),
        "grid_t_years": surface.grid_t.tolist(),
        "values": surface.values.tolist(),
    }
    return json.dumps(payload, sort_keys=True)
