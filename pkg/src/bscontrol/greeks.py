"""Classical greeks, perturbed Delta/Gamma decompositions, and FD cross-checks.

The perturbed price is C(S,t) = C_cl(S,t) + eps * sum_j P_j(S,t) with

    P_j = E e^(alpha x + beta tau) lam^-j u_cl(x/lam^j, tau/lam^2j).

Differentiating each profile exactly in S (using S d/dS = d/dx and the
identity e^(E+) phi(A+) = e^(E-) phi(A-) at equal arguments) gives

    dP_j/dS   = e^((alpha-1)x + beta tau) lam^-j
                [ c+ e^(E+) N(A+) - c- e^(E-) N(A-) ],
    d2P_j/dS2 = (1/S) e^((alpha-1)x + beta tau) lam^-j
                [ c+(c+ - 1) e^(E+) N(A+) - c-(c- - 1) e^(E-) N(A-)
                  + lam^-2j e^(E+) phi(A+) / sqrt(2 tau_j) ],

with c+- = alpha + lam^-j (k +- 1)/2 and E+-, A+- taken at the rescaled
point (x/lam^j, tau/lam^2j).  At lam^j = 1 these collapse to N(d1) and the
standard gamma, and the perturbed forms stay consistent with finite
differences of the perturbed price (the structure is still "classical plus
an eps-signed sum of per-profile terms").  Perturbed Vega/Theta/Rho have no
closed decomposition here and are computed by finite differences of the
perturbed price; they are labeled as derived quantities in reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .model import MarketParams, PhysicalPoint, derive_constants, to_heat
from .profiles import ScaleSpec
from .solution import SCHEMA_VERSION, SolutionSurface, call_price
from .specfun import norm_cdf, norm_pdf

__all__ = [
    "ExpiryKinkError",
    "StepUnderflowError",
    "GreeksReport",
    "delta_classical",
    "delta_perturbed",
    "gamma_classical",
    "gamma_perturbed",
    "vega_theta_rho",
    "fd_greek",
    "greeks_report",
    "delta_shift_surface",
]


class ExpiryKinkError(ValueError):
    """Greek undefined at the payoff kink (t = T, S = E)."""


class StepUnderflowError(ValueError):
    """Finite-difference step too small relative to the variable's scale."""


@dataclass(frozen=True)
class GreeksReport:
    """Point sensitivities with explicit variant and conventions attached."""

    delta: float
    gamma: float
    vega: float
    theta: float
    rho: float
    variant: str
    spec: ScaleSpec | None = None

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "variant": self.variant,
            "scale": None
            if self.spec is None
            else {"lambda": self.spec.lam, "n0": self.spec.n0, "epsilon": self.spec.epsilon},
            "values": {
                "delta": self.delta,
                "gamma": self.gamma,
                "vega": self.vega,
                "theta": self.theta,
                "rho": self.rho,
            },
            "units": {
                "delta": "dimensionless",
                "gamma": "per currency unit",
                "vega": "currency per unit volatility",
                "theta": "currency per year",
                "rho": "currency per unit rate",
            },
            "conventions": {
                "theta": "dC/dt in calendar time (negative before expiry for calls)",
                "perturbed_vega_theta_rho": "central finite differences of the perturbed price",
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _heat_coords(p: PhysicalPoint, params: MarketParams):
    h = to_heat(p, params)
    c = derive_constants(params)
    if h.tau == 0.0:
        if p.S == params.strike:
            raise ExpiryKinkError("greek undefined at t = T, S = E (payoff kink)")
        return h, c, True
    return h, c, False


def _d1(x: float, tau: float, k: float) -> float:
    return x / math.sqrt(2.0 * tau) + (k + 1.0) * math.sqrt(0.5 * tau)


def delta_classical(p: PhysicalPoint, params: MarketParams) -> float:
    """dC/dS of the classical call, N(d1); the intrinsic step at expiry."""
    h, c, at_expiry = _heat_coords(p, params)
    if at_expiry:
        return 1.0 if p.S > params.strike else 0.0
    return norm_cdf(_d1(h.x, h.tau, c.k))


def _profile_delta(x: float, tau: float, k: float, alpha: float, beta: float,
                   scale: float) -> float:
    xs = x / scale
    ts = tau / (scale * scale)
    inv = 1.0 / math.sqrt(2.0 * ts)
    half = math.sqrt(0.5 * ts)
    ap = xs * inv + (k + 1.0) * half
    am = xs * inv + (k - 1.0) * half
    ep = 0.5 * (k + 1.0) * xs + 0.25 * (k + 1.0) ** 2 * ts
    em = 0.5 * (k - 1.0) * xs + 0.25 * (k - 1.0) ** 2 * ts
    cp = alpha + 0.5 * (k + 1.0) / scale
    cm = alpha + 0.5 * (k - 1.0) / scale
    pref = math.exp((alpha - 1.0) * x + beta * tau) / scale
    return pref * (cp * math.exp(ep) * norm_cdf(ap) - cm * math.exp(em) * norm_cdf(am))


def delta_perturbed(p: PhysicalPoint, params: MarketParams, spec: ScaleSpec) -> float:
    """dC/dS of the perturbed call: classical delta plus the per-profile sum."""
    h, c, at_expiry = _heat_coords(p, params)
    if at_expiry:
        raise ExpiryKinkError("perturbed delta undefined at t = T")
    lam = spec.lam
    acc = 0.0
    for j in range(1, spec.n0 + 1):
        acc += _profile_delta(h.x, h.tau, c.k, c.alpha, c.beta, lam**j)
    return norm_cdf(_d1(h.x, h.tau, c.k)) + spec.epsilon * acc


def gamma_classical(p: PhysicalPoint, params: MarketParams) -> float:
    """d2C/dS2 of the classical call, phi(d1) / (S sigma sqrt(T - t))."""
    h, c, at_expiry = _heat_coords(p, params)
    if at_expiry:
        return 0.0
    d1 = _d1(h.x, h.tau, c.k)
    return norm_pdf(d1) / (p.S * math.sqrt(2.0 * h.tau))


def _profile_gamma(x: float, tau: float, k: float, alpha: float, beta: float,
                   scale: float, S: float) -> float:
    xs = x / scale
    ts = tau / (scale * scale)
    inv = 1.0 / math.sqrt(2.0 * ts)
    half = math.sqrt(0.5 * ts)
    ap = xs * inv + (k + 1.0) * half
    am = xs * inv + (k - 1.0) * half
    ep = 0.5 * (k + 1.0) * xs + 0.25 * (k + 1.0) ** 2 * ts
    em = 0.5 * (k - 1.0) * xs + 0.25 * (k - 1.0) ** 2 * ts
    cp = alpha + 0.5 * (k + 1.0) / scale
    cm = alpha + 0.5 * (k - 1.0) / scale
    bracket = (
        cp * (cp - 1.0) * math.exp(ep) * norm_cdf(ap)
        - cm * (cm - 1.0) * math.exp(em) * norm_cdf(am)
        + math.exp(ep) * norm_pdf(ap) * inv / (scale * scale)
    )
    return math.exp((alpha - 1.0) * x + beta * tau) * bracket / (scale * S)


def gamma_perturbed(p: PhysicalPoint, params: MarketParams, spec: ScaleSpec) -> float:
    """d2C/dS2 of the perturbed call: classical gamma plus the per-profile sum."""
    h, c, at_expiry = _heat_coords(p, params)
    if at_expiry:
        raise ExpiryKinkError("perturbed gamma undefined at t = T")
    lam = spec.lam
    acc = 0.0
    for j in range(1, spec.n0 + 1):
        acc += _profile_gamma(h.x, h.tau, c.k, c.alpha, c.beta, lam**j, p.S)
    return gamma_classical(p, params) + spec.epsilon * acc


def vega_theta_rho(p: PhysicalPoint, params: MarketParams) -> tuple[float, float, float]:
    """Classical Vega, Theta and Rho.

    Theta follows the calendar convention dC/dt (negative for calls before
    expiry); Rho is the discounted-strike sensitivity E (T-t) e^(-r(T-t)) N(d2).
    """
    h, c, at_expiry = _heat_coords(p, params)
    if at_expiry:
        raise ExpiryKinkError("vega/theta/rho undefined at t = T")
    remaining = params.maturity - p.t
    sq = math.sqrt(remaining)
    d1 = _d1(h.x, h.tau, c.k)
    d2 = d1 - params.sigma * sq
    disc = math.exp(-params.r * remaining)
    vega = p.S * norm_pdf(d1) * sq
    theta = -0.5 * p.S * norm_pdf(d1) * params.sigma / sq - params.r * params.strike * disc * norm_cdf(d2)
    rho = params.strike * remaining * disc * norm_cdf(d2)
    return vega, theta, rho


_FD_KINDS = ("S1", "S2", "sigma", "t", "r")


def fd_greek(
    price_fn,
    p: PhysicalPoint,
    params: MarketParams,
    which: str,
    step: float,
    order: int = 2,
) -> float:
    """Centered finite difference of `price_fn(point, params)`.

    `which` selects the bumped variable: "S1"/"S2" for the first/second
    derivative in S, "sigma", "t" or "r" for first derivatives in those
    parameters.  `order` 2 uses the classic 3-point stencils, 4 the 5-point
    ones (useful where the integrand's curvature scale is short).
    """
    if which not in _FD_KINDS:
        raise ValueError(f"which must be one of {_FD_KINDS}, got {which!r}")
    if order not in (2, 4):
        raise ValueError(f"order must be 2 or 4, got {order}")
    if not step > 0.0:
        raise ValueError(f"step must be > 0, got {step}")
    scale = {"S1": p.S, "S2": p.S, "sigma": params.sigma, "t": params.maturity,
             "r": max(params.r, 1.0)}[which]
    if step < 1e-12 * scale:
        raise StepUnderflowError(f"step {step} below 1e-12 * scale ({scale})")

    if which in ("S1", "S2"):
        def f(h: float) -> float:
            return price_fn(PhysicalPoint(S=p.S + h, t=p.t), params)
    elif which == "sigma":
        def f(h: float) -> float:
            return price_fn(p, replace(params, sigma=params.sigma + h))
    elif which == "t":
        def f(h: float) -> float:
            return price_fn(PhysicalPoint(S=p.S, t=p.t + h), params)
    else:
        def f(h: float) -> float:
            return price_fn(p, replace(params, r=params.r + h))

    h = step
    if which == "S2":
        if order == 2:
            return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
        return (-f(2 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2 * h)) / (
            12.0 * h * h
        )
    if order == 2:
        return (f(h) - f(-h)) / (2.0 * h)
    return (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h)) / (12.0 * h)


def greeks_report(
    p: PhysicalPoint, params: MarketParams, spec: ScaleSpec | None = None
) -> GreeksReport:
    """Assemble a full report; perturbed Vega/Theta/Rho come from FD."""
    if spec is None:
        vega, theta, rho = vega_theta_rho(p, params)
        return GreeksReport(
            delta=delta_classical(p, params),
            gamma=gamma_classical(p, params),
            vega=vega,
            theta=theta,
            rho=rho,
            variant="classical",
        )

    def priced(point: PhysicalPoint, prm: MarketParams) -> float:
        return call_price(point, prm, spec)

    remaining = params.maturity - p.t
    vega = fd_greek(priced, p, params, "sigma", 1e-5 * params.sigma)
    theta = fd_greek(priced, p, params, "t", min(1e-4 * remaining, 0.25 * remaining))
    rho = fd_greek(priced, p, params, "r", 1e-6)
    return GreeksReport(
        delta=delta_perturbed(p, params, spec),
        gamma=gamma_perturbed(p, params, spec),
        vega=vega,
        theta=theta,
        rho=rho,
        variant="perturbed",
        spec=spec,
    )


def delta_shift_surface(
    grid_s, grid_t, params: MarketParams, spec: ScaleSpec
) -> SolutionSurface:
    """Surface of Delta - Delta_classical on an (S, t) grid (t < T required)."""
    gs = np.asarray(grid_s, dtype=float)
    gt = np.asarray(grid_t, dtype=float)
    values = np.empty((gt.size, gs.size))
    for i, t in enumerate(gt):
        for j, s in enumerate(gs):
            point = PhysicalPoint(S=s, t=t)
            values[i, j] = delta_perturbed(point, params, spec) - delta_classical(
                point, params
            )
    return SolutionSurface(grid_s=gs, grid_t=gt, values=values, params=params, spec=spec)
