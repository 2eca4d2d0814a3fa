"""Market parameters and the change of variables to the normalized heat problem.

The European call problem in physical variables (S, t) maps onto the heat
equation u_tau = u_xx via

    x = ln(S/E),        tau = sigma^2 (T - t) / 2,
    C(S, t) = E exp(alpha x + beta tau) u(x, tau),

with k = 2 r / sigma^2, alpha = (1 - k)/2 and beta = -(k + 1)^2 / 4.
All public entry points accept physical coordinates and convert internally;
calendar time t runs forward, tau measures remaining (rescaled) time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "MarketParams",
    "HeatConstants",
    "HeatPoint",
    "PhysicalPoint",
    "derive_constants",
    "to_heat",
    "from_heat",
    "heat_value_to_price",
]


@dataclass(frozen=True)
class MarketParams:
    """Physical problem definition: rate, volatility, strike and horizon.

    `r` and `sigma` are annualized; `maturity` is in years.  `day_count`
    is the days-per-year divisor applied when inputs arrive in days.
    """

    r: float
    sigma: float
    strike: float
    maturity: float
    day_count: float = 365.0

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.strike > 0.0:
            raise ValueError(f"strike must be > 0, got {self.strike}")
        if not self.maturity > 0.0:
            raise ValueError(f"maturity must be > 0, got {self.maturity}")
        if self.r < 0.0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if not self.day_count > 0.0:
            raise ValueError(f"day_count must be > 0, got {self.day_count}")

    @classmethod
    def from_days(
        cls,
        r: float,
        sigma: float,
        strike: float,
        maturity_days: float,
        day_count: float = 365.0,
    ) -> "MarketParams":
        return cls(r, sigma, strike, maturity_days / day_count, day_count)

    @property
    def tau_max(self) -> float:
        """Heat time corresponding to t = 0, i.e. sigma^2 T / 2."""
        return 0.5 * self.sigma * self.sigma * self.maturity


@dataclass(frozen=True)
class HeatConstants:
    """Coefficients of the transformed problem: k = 2r/sigma^2, alpha, beta."""

    k: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class HeatPoint:
    """Heat coordinates: log-moneyness x and remaining heat time tau >= 0."""

    x: float
    tau: float

    def __post_init__(self) -> None:
        if self.tau < 0.0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")


@dataclass(frozen=True)
class PhysicalPoint:
    """Physical coordinates: asset price S > 0 and calendar time t >= 0."""

    S: float
    t: float

    def __post_init__(self) -> None:
        if not self.S > 0.0:
            raise ValueError(f"S must be > 0, got {self.S}")
        if self.t < 0.0:
            raise ValueError(f"t must be >= 0, got {self.t}")


def derive_constants(params: MarketParams) -> HeatConstants:
    """Derive (k, alpha, beta) for the heat transform of `params`.

    beta admits two equivalent forms, alpha^2 + (k-1) alpha - k and
    -(k+1)^2/4; the second is used because it avoids cancellation.
    """
    k = 2.0 * params.r / (params.sigma * params.sigma)
    alpha = 0.5 * (1.0 - k)
    beta = -0.25 * (k + 1.0) * (k + 1.0)
    return HeatConstants(k=k, alpha=alpha, beta=beta)


def to_heat(p: PhysicalPoint, params: MarketParams) -> HeatPoint:
    """Map a physical point to heat coordinates.

    Requires 0 <= t <= T; t = T maps to tau = 0 (expiry).
    """
    if p.t > params.maturity:
        raise ValueError(
            f"t must lie in [0, {params.maturity}], got {p.t}"
        )
    x = math.log(p.S / params.strike)
    tau = 0.5 * params.sigma * params.sigma * (params.maturity - p.t)
    return HeatPoint(x=x, tau=tau)


def from_heat(h: HeatPoint, params: MarketParams) -> PhysicalPoint:
    """Inverse of `to_heat`; requires tau in [0, sigma^2 T / 2]."""
    if h.tau > params.tau_max * (1.0 + 1e-12):
        raise ValueError(
            f"tau must lie in [0, {params.tau_max}], got {h.tau}"
        )
    S = params.strike * math.exp(h.x)
    t = params.maturity - 2.0 * h.tau / (params.sigma * params.sigma)
    return PhysicalPoint(S=S, t=max(t, 0.0))


def heat_value_to_price(h: HeatPoint, u: float, params: MarketParams) -> float:
    """Back-transform a heat-solution value to a price: E e^(alpha x + beta tau) u.

    At tau = 0 this maps the transformed payoff to max(S - E, 0) exactly,
    through the identity e^(alpha x) (e^((k+1)x/2) - e^((k-1)x/2)) = e^x - 1.
    """
    c = derive_constants(params)
    return params.strike * math.exp(c.alpha * h.x + c.beta * h.tau) * u
