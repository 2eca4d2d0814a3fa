"""Crank-Nicolson solver for u_tau = u_xx, used only as a validation oracle.

The scheme is the standard theta = 1/2 time stepping on a uniform grid with
Dirichlet boundaries.  Boundary values are supplied as callables of tau and
default to zero; validation runs feed them from the closed-form solution so
that the measured error isolates the interior discretization.  The payoff
kink at x = 0 is not smoothed; callers trim boundary nodes and rely on the
scheme's damping (the runs here keep d_tau / h^2 well below 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .model import MarketParams, derive_constants

__all__ = [
    "InstabilityError",
    "FdGrid",
    "FdSolution",
    "ErrorReport",
    "solve_heat_cn",
    "compare_surfaces",
    "export_csv",
]

_BLOWUP = 1e12


class InstabilityError(RuntimeError):
    """Values exceeded the blow-up guard; usually a boundary misconfiguration."""


@dataclass(frozen=True)
class FdGrid:
    """Uniform space-time grid for the truncated heat problem."""

    x_min: float = -6.0
    x_max: float = 6.0
    nx: int = 2001
    n_tau: int = 2000
    tau_end: float = 0.0074

    def __post_init__(self) -> None:
        if not (self.x_min < 0.0 < self.x_max):
            raise ValueError("grid must satisfy x_min < 0 < x_max")
        if self.nx < 3:
            raise ValueError(f"nx must be >= 3, got {self.nx}")
        if self.n_tau < 1:
            raise ValueError(f"n_tau must be >= 1, got {self.n_tau}")
        if not self.tau_end > 0.0:
            raise ValueError(f"tau_end must be > 0, got {self.tau_end}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def d_tau(self) -> float:
        return self.tau_end / self.n_tau

    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def tau_levels(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_end, self.n_tau + 1)


@dataclass
class FdSolution:
    """All time levels of a run: values[level, node], level 0 = initial data."""

    grid: FdGrid
    values: np.ndarray
    boundary_mode: str = "dirichlet"


@dataclass(frozen=True)
class ErrorReport:
    max_abs: float
    rms: float
    at_tau: float
    at_x: float
    n_points: int = 0


def solve_heat_cn(
    initial: Callable[[float], float],
    grid: FdGrid,
    left_bc: Callable[[float], float] | None = None,
    right_bc: Callable[[float], float] | None = None,
) -> FdSolution:
    """Crank-Nicolson run with Dirichlet boundaries.

    Row 0 of the result is the sampled initial data, exactly.  Raises
    InstabilityError if any value passes 1e12 in magnitude.
    """
    x = grid.x_nodes()
    taus = grid.tau_levels()
    left = left_bc if left_bc is not None else (lambda tau: 0.0)
    right = right_bc if right_bc is not None else (lambda tau: 0.0)

    values = np.empty((grid.n_tau + 1, grid.nx))
    values[0] = [initial(float(xi)) for xi in x]
    if not np.all(np.isfinite(values[0])):
        raise ValueError("initial data must be finite on the grid")

    r = 0.5 * grid.d_tau / (grid.h * grid.h)
    m = grid.nx - 2
    # banded LHS (I + r A) for the interior unknowns
    ab = np.zeros((3, m))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r

    u = values[0].copy()
    for n in range(1, grid.n_tau + 1):
        tau_new = taus[n]
        rhs = (1.0 - 2.0 * r) * u[1:-1] + r * (u[:-2] + u[2:])
        bl = left(float(tau_new))
        br = right(float(tau_new))
        rhs[0] += r * bl
        rhs[-1] += r * br
        interior = solve_banded((1, 1), ab, rhs, check_finite=False)
        u = np.empty(grid.nx)
        u[0] = bl
        u[-1] = br
        u[1:-1] = interior
        if np.max(np.abs(u)) > _BLOWUP:
            raise InstabilityError(
                f"value magnitude exceeded {_BLOWUP:g} at level {n}"
            )
        values[n] = u

    mode = "dirichlet (left {}, right {})".format(
        "zero" if left_bc is None else "callable",
        "zero" if right_bc is None else "callable",
    )
    return FdSolution(grid=grid, values=values, boundary_mode=mode)


def compare_surfaces(
    fd: FdSolution,
    analytic: Callable[[float, float], float],
    trim: int = 0,
    levels=None,
) -> ErrorReport:
    """Error statistics of the run against `analytic(x, tau)` on interior nodes.

    `trim` nodes are excluded at each spatial boundary; `levels` restricts
    the time levels compared (default: all).  Deterministic.
    """
    if trim < 0:
        raise ValueError(f"trim must be >= 0, got {trim}")
    grid = fd.grid
    x = grid.x_nodes()
    taus = grid.tau_levels()
    lo = 1 + trim
    hi = grid.nx - 1 - trim
    if hi - lo < 1:
        raise ValueError("trim leaves no interior nodes")
    if levels is None:
        levels = range(grid.n_tau + 1)

    max_abs = -1.0
    at_tau = at_x = 0.0
    sum_sq = 0.0
    count = 0
    for lev in levels:
        tau = float(taus[lev])
        row = fd.values[lev]
        for i in range(lo, hi):
            err = abs(row[i] - analytic(float(x[i]), tau))
            sum_sq += err * err
            count += 1
            if err > max_abs:
                max_abs = err
                at_tau = tau
                at_x = float(x[i])
    return ErrorReport(
        max_abs=max_abs,
        rms=math.sqrt(sum_sq / count),
        at_tau=at_tau,
        at_x=at_x,
        n_points=count,
    )


def export_csv(fd: FdSolution, params: MarketParams) -> str:
    """Serialize the run in the surface CSV schema (t,S,value), price units.

    Nodes map back to physical coordinates via S = E e^x and
    t = T - 2 tau / sigma^2; values through the e^(alpha x + beta tau)
    back-transform, so the file diffs directly against price surfaces.
    """
    c = derive_constants(params)
    x = fd.grid.x_nodes()
    taus = fd.grid.tau_levels()
    lines = ["t,S,value"]
    for lev in range(fd.grid.n_tau + 1):
        tau = float(taus[lev])
        t = params.maturity - 2.0 * tau / (params.sigma * params.sigma)
        for i, xi in enumerate(x):
            price = params.strike * math.exp(c.alpha * xi + c.beta * tau) * fd.values[lev, i]
            lines.append(f"{t!r},{params.strike * math.exp(xi)!r},{price!r}")
    return "\n".join(lines) + "\n"
