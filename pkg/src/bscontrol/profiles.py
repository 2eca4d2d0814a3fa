"""Transformed payoff, the scale-perturbed initial-data family and its L2 checks.

The transformed terminal payoff is

    u0(x) = max(e^((k+1)x/2) - e^((k-1)x/2), 0),

zero for x <= 0.  The perturbation family adds rescaled copies,

    u0_lam(x) = u0(x) + eps * sum_{j=1..n0} lam^-j u0(x / lam^j),

and `l2_consistency` measures ||u0_lam - u0||^2 on a finite interval of the
x axis together with the geometric upper bound lam^-1 (1 - lam^-n0) /
(1 - lam^-1) * ||u0||^2 that controls it for large lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MarketParams

__all__ = [
    "ScaleSpec",
    "L2Report",
    "QuadratureError",
    "ThresholdNotFoundError",
    "heat_payoff",
    "scaled_initial_data",
    "adaptive_simpson",
    "l2_consistency",
    "find_lambda0",
    "initial_condition_curve",
    "DEFAULT_INTERVAL",
]

# Study interval in x corresponding to S in [E, 2E]; exposed so callers can
# rescale via x0 = ln(S0/E).
DEFAULT_INTERVAL = (0.0, math.log(2.0))


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach tolerance within its depth budget."""


class ThresholdNotFoundError(RuntimeError):
    """No scale factor below the search cap drives the deviation under tolerance."""


@dataclass(frozen=True)
class ScaleSpec:
    """Perturbation knobs: scale factor lam > 1, profile count n0, sign epsilon."""

    lam: float
    n0: int = 1
    epsilon: int = 1

    def __post_init__(self) -> None:
        if not self.lam > 1.0:
            raise ValueError(f"lam must be > 1, got {self.lam}")
        if self.n0 < 1 or int(self.n0) != self.n0:
            raise ValueError(f"n0 must be a positive integer, got {self.n0}")
        if self.epsilon not in (-1, 1):
            raise ValueError(f"epsilon must be -1 or +1, got {self.epsilon}")


@dataclass(frozen=True)
class L2Report:
    """L2 deviation of the perturbed initial data, with its geometric bound.

    `deviation_sq` is ||u0_lam - u0||^2 on `interval`; `upper_bound` the
    geometric-sum majorant of the diagonal terms; `cross_term` the summed
    off-diagonal inner products (the part that pseudo-orthogonality makes
    small for well-separated scales).
    """

    deviation_sq: float
    upper_bound: float
    cross_term: float
    interval: tuple[float, float]


def heat_payoff(x: float, k: float) -> float:
    """Transformed call payoff; zero for x <= 0, strictly positive beyond."""
    if x <= 0.0:
        return 0.0
    return math.exp(0.5 * (k + 1.0) * x) - math.exp(0.5 * (k - 1.0) * x)


def scaled_initial_data(x: float, spec: ScaleSpec, k: float) -> float:
    """Perturbed initial data u0(x) + eps sum lam^-j u0(x / lam^j)."""
    lam = spec.lam
    acc = 0.0
    for j in range(1, spec.n0 + 1):
        acc += lam ** (-j) * heat_payoff(x / lam**j, k)
    return heat_payoff(x, k) + spec.epsilon * acc


def _simpson(fa: float, fm: float, fb: float, width: float) -> float:
    return width * (fa + 4.0 * fm + fb) / 6.0


_EPS = 2.220446049250313e-16


def _adaptive(f, a, fa, m, fm, b, fb, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    # second test: refinement signal below local roundoff, cannot improve
    if abs(delta) <= 15.0 * tol or abs(delta) <= 64.0 * _EPS * (abs(left) + abs(right)):
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"tolerance {tol} unreachable on [{a}, {b}] within depth budget"
        )
    half = 0.5 * tol
    return _adaptive(f, a, fa, lm, flm, m, fm, left, half, depth - 1) + _adaptive(
        f, m, fm, rm, frm, b, fb, right, half, depth - 1
    )


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 48) -> float:
    """Adaptive composite Simpson integration of f on [a, b].

    `tol` is an absolute error budget; the classic delta/15 Richardson
    correction is applied on accepted panels.  Raises QuadratureError when
    the recursion depth budget is exhausted before the tolerance is met.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if a == b:
        return 0.0
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive(f, a, fa, m, fm, b, fb, whole, tol, max_depth)


def _deviation(x: float, lam: float, n0: int, k: float) -> float:
    # eps drops out of every squared/paired integrand (eps^2 = 1)
    acc = 0.0
    for j in range(1, n0 + 1):
        acc += lam ** (-j) * heat_payoff(x / lam**j, k)
    return acc


def l2_consistency(
    spec: ScaleSpec,
    k: float,
    interval: tuple[float, float] = DEFAULT_INTERVAL,
    quad_tol: float = 1e-10,
) -> L2Report:
    """Measure ||u0_lam - u0||^2 on `interval` against its geometric bound.

    The integration runs in the heat variable x over [a, b] with
    0 <= a < b; integrands are smooth there (the payoff kink sits at 0).
    """
    a, b = interval
    if not (0.0 <= a < b):
        raise ValueError(f"interval must satisfy 0 <= a < b, got {interval}")
    if not quad_tol > 0.0:
        raise ValueError(f"quad_tol must be > 0, got {quad_tol}")
    lam, n0 = spec.lam, spec.n0

    deviation_sq = adaptive_simpson(
        lambda x: _deviation(x, lam, n0, k) ** 2, a, b, quad_tol
    )
    norm0_sq = adaptive_simpson(lambda x: heat_payoff(x, k) ** 2, a, b, quad_tol)
    upper_bound = (1.0 / lam) * (1.0 - lam ** (-n0)) / (1.0 - 1.0 / lam) * norm0_sq

    cross = 0.0
    for j in range(1, n0 + 1):
        for m in range(j + 1, n0 + 1):
            inner = adaptive_simpson(
                lambda x: heat_payoff(x / lam**j, k) * heat_payoff(x / lam**m, k),
                a,
                b,
                quad_tol,
            )
            cross += 2.0 * lam ** (-j - m) * inner

    return L2Report(
        deviation_sq=deviation_sq,
        upper_bound=upper_bound,
        cross_term=cross,
        interval=(a, b),
    )


def find_lambda0(
    eps_tol: float,
    n0: int,
    k: float,
    interval: tuple[float, float] = DEFAULT_INTERVAL,
    quad_tol: float = 1e-12,
    lam_max: float = 1e8,
) -> float:
    """Smallest scale factor whose L2 deviation stays under `eps_tol`.

    Scans a logarithmic grid on (1, lam_max], requires the tolerance to hold
    for every tested value above the returned one, then refines the crossing
    by bisection to 1% relative.
    """
    if not eps_tol > 0.0:
        raise ValueError(f"eps_tol must be > 0, got {eps_tol}")

    def dev_sq(lam: float) -> float:
        spec = ScaleSpec(lam=lam, n0=n0, epsilon=1)
        return l2_consistency(spec, k, interval, quad_tol).deviation_sq

    grid = np.geomspace(1.01, lam_max, 160)
    values = [dev_sq(lam) for lam in grid]
    ok = [v <= eps_tol for v in values]
    if not ok[-1]:
        raise ThresholdNotFoundError(
            f"deviation stays above {eps_tol} up to lam = {lam_max}"
        )
    # first index from which the tolerance holds for every larger grid value
    idx = len(grid) - 1
    while idx > 0 and ok[idx - 1]:
        idx -= 1
    if idx == 0:
        return float(grid[0])

    lo, hi = float(grid[idx - 1]), float(grid[idx])
    while hi / lo - 1.0 > 0.01:
        mid = math.sqrt(lo * hi)
        if dev_sq(mid) <= eps_tol:
            hi = mid
        else:
            lo = mid
    return hi


def initial_condition_curve(
    s_values, spec: ScaleSpec, params: MarketParams, k: float
) -> tuple[np.ndarray, np.ndarray]:
    """Sample u0 and u0_lam over asset prices, for the comparison curves.

    Returns (c0, c0_lam) matching `s_values`; entries with S = 0 are 0 by
    the payoff's left limit.
    """
    s_arr = np.asarray(s_values, dtype=float)
    c0 = np.zeros_like(s_arr)
    c0_lam = np.zeros_like(s_arr)
    for i, s in enumerate(s_arr):
        if s <= 0.0:
            continue
        x = math.log(s / params.strike)
        c0[i] = heat_payoff(x, k)
        c0_lam[i] = scaled_initial_data(x, spec, k)
    return c0, c0_lam
