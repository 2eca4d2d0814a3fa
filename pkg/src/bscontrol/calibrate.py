"""Solve for the scale factor producing a prescribed Delta shift.

The calibration objective is Delta - Delta_classical = d at a reference
point, or Delta = (1 + eps eta0) Delta_classical in relative mode.  The
shift as a function of lam is smooth and cheap, so the solver favors
robustness: a logarithmic bracket scan, bisection to a narrow bracket,
then a secant polish on the shift residual.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .greeks import delta_classical, delta_perturbed
from .model import MarketParams, PhysicalPoint
from .profiles import ScaleSpec
from .solution import SCHEMA_VERSION

__all__ = [
    "DEFAULT_N0",
    "CalibrationTarget",
    "CalibrationResult",
    "NoBracketError",
    "achieved_shift",
    "desired_shift",
    "solve_lambda",
]

# Profile-count convention used wherever a default is needed.
DEFAULT_N0 = 1


class NoBracketError(RuntimeError):
    """The requested shift is not attained anywhere on the search interval."""

    def __init__(self, message: str, max_achievable: float, at_lambda: float):
        super().__init__(message)
        self.max_achievable = max_achievable
        self.at_lambda = at_lambda


@dataclass(frozen=True)
class CalibrationTarget:
    """Reference point and conventions for the shift objective.

    `mode` is "absolute" (value = d, the shift itself) or "relative"
    (value = eta0 in (0,1), shift = eps * eta0 * Delta_classical).
    """

    mode: str
    value: float
    reference: PhysicalPoint
    params: MarketParams
    n0: int = DEFAULT_N0
    epsilon: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("absolute", "relative"):
            raise ValueError(f"mode must be 'absolute' or 'relative', got {self.mode!r}")
        if self.mode == "relative" and not (0.0 < self.value < 1.0):
            raise ValueError(f"eta0 must lie in (0, 1), got {self.value}")
        if self.epsilon not in (-1, 1):
            raise ValueError(f"epsilon must be -1 or +1, got {self.epsilon}")
        if self.reference.t >= self.params.maturity:
            raise ValueError("reference point must be strictly before expiry")


@dataclass(frozen=True)
class CalibrationResult:
    lambda_star: float
    achieved_shift: float
    residual: float
    iterations: int
    bracket: tuple[float, float]
    non_monotone: bool = False

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "lambda_star": self.lambda_star,
            "achieved_shift": self.achieved_shift,
            "residual": self.residual,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "non_monotone": self.non_monotone,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def achieved_shift(lam: float, target: CalibrationTarget) -> float:
    """Delta shift at the reference point for scale factor `lam`."""
    if not lam > 1.0:
        raise ValueError(f"lam must be > 1, got {lam}")
    spec = ScaleSpec(lam=lam, n0=target.n0, epsilon=target.epsilon)
    p, params = target.reference, target.params
    return delta_perturbed(p, params, spec) - delta_classical(p, params)


def desired_shift(target: CalibrationTarget) -> float:
    """Resolve the target's mode/value into the shift the solver aims for."""
    if target.mode == "absolute":
        return target.value
    base = delta_classical(target.reference, target.params)
    return target.epsilon * target.value * base


def solve_lambda(
    target: CalibrationTarget,
    desired: float | None = None,
    tol: float = 1e-10,
    lam_min: float = 1.0 + 1e-6,
    lam_max: float = 1e6,
    grid_points: int = 120,
) -> CalibrationResult:
    """Find lam with achieved_shift(lam) = desired, to |residual| <= tol.

    A geometric grid on (lam_min, lam_max] locates sign changes of the
    residual; with several crossings the largest root is kept (the weakest
    perturbation that meets the target) and the result is flagged.  The
    bracket is narrowed by bisection, then polished by secant steps; the
    reported residual is an independent re-evaluation at lambda_star.
    """
    if desired is None:
        desired = desired_shift(target)
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if desired * target.epsilon <= 0.0:
        raise ValueError(
            f"desired shift {desired} has the wrong sign for epsilon={target.epsilon}"
        )

    def residual_fn(lam: float) -> float:
        return achieved_shift(lam, target) - desired

    grid = np.geomspace(lam_min, lam_max, grid_points)
    values = [residual_fn(lam) for lam in grid]
    iterations = len(values)

    crossings = [
        i
        for i in range(len(grid) - 1)
        if values[i] == 0.0 or values[i] * values[i + 1] < 0.0
    ]
    if not crossings:
        shifts = [v + desired for v in values]
        best = max(range(len(shifts)), key=lambda i: abs(shifts[i]))
        raise NoBracketError(
            f"shift {desired} not attained on ({lam_min}, {lam_max}]; "
            f"max achievable is {shifts[best]} at lambda={grid[best]}",
            max_achievable=shifts[best],
            at_lambda=float(grid[best]),
        )
    non_monotone = len(crossings) > 1
    idx = crossings[-1]  # largest-lambda crossing
    lo, hi = float(grid[idx]), float(grid[idx + 1])
    f_lo, f_hi = values[idx], values[idx + 1]
    bracket = (lo, hi)

    # bisection to a narrow bracket
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        f_mid = residual_fn(mid)
        iterations += 1
        if f_mid == 0.0:
            lo = hi = mid
            f_lo = f_hi = f_mid
            break
        if f_lo * f_mid < 0.0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid

    # secant polish on the residual, falling back to bisection when a step
    # leaves the bracket
    a, fa = lo, f_lo
    b, fb = hi, f_hi
    x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    for _ in range(100):
        if abs(fx) <= tol:
            break
        if fb != fa:
            cand = b - fb * (b - a) / (fb - fa)
        else:
            cand = 0.5 * (lo + hi)
        if not (lo <= cand <= hi):
            cand = 0.5 * (lo + hi)
        f_cand = residual_fn(cand)
        iterations += 1
        if f_lo * f_cand <= 0.0:
            hi, f_hi = cand, f_cand
        else:
            lo, f_lo = cand, f_cand
        a, fa, b, fb = b, fb, cand, f_cand
        x, fx = cand, f_cand

    final_shift = achieved_shift(x, target)
    return CalibrationResult(
        lambda_star=float(x),
        achieved_shift=final_shift,
        residual=final_shift - desired,
        iterations=iterations,
        bracket=bracket,
        non_monotone=non_monotone,
    )
