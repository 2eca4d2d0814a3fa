"""Shape-parameter control of Black-Scholes call prices and greeks.

The package transforms the call problem to the normalized heat equation,
perturbs its initial data with a family of rescaled payoff profiles, and
exposes exact prices, greeks and a calibration of the scale factor that
achieves a prescribed Delta shift.  A Crank-Nicolson solver validates every
closed form independently.
"""

from .calibrate import (
    DEFAULT_N0,
    CalibrationResult,
    CalibrationTarget,
    NoBracketError,
    achieved_shift,
    desired_shift,
    solve_lambda,
)
from .fdsolver import (
    ErrorReport,
    FdGrid,
    FdSolution,
    InstabilityError,
    compare_surfaces,
    solve_heat_cn,
)
from .greeks import (
    ExpiryKinkError,
    GreeksReport,
    StepUnderflowError,
    delta_classical,
    delta_perturbed,
    delta_shift_surface,
    fd_greek,
    gamma_classical,
    gamma_perturbed,
    greeks_report,
    vega_theta_rho,
)
from .model import (
    HeatConstants,
    HeatPoint,
    MarketParams,
    PhysicalPoint,
    derive_constants,
    from_heat,
    heat_value_to_price,
    to_heat,
)
from .profiles import (
    L2Report,
    QuadratureError,
    ScaleSpec,
    ThresholdNotFoundError,
    adaptive_simpson,
    find_lambda0,
    heat_payoff,
    initial_condition_curve,
    l2_consistency,
    scaled_initial_data,
)
from .solution import (
    SCHEMA_VERSION,
    DegenerateTimeError,
    SolutionSurface,
    call_price,
    classical_heat,
    perturbed_heat,
    perturbed_heat_erfc,
    price_surface,
    surface_to_csv,
    surface_to_json,
)
from .specfun import erfc, norm_cdf, norm_pdf

__version__ = "0.1.0"
