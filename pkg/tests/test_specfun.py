import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bscontrol import adaptive_simpson, erfc, norm_cdf, norm_pdf

_SQRT_PI = math.sqrt(math.pi)


def erf_series(z: float, terms: int = 30) -> float:
    """Maclaurin series of erf, summed exactly with fsum; independent oracle."""
    terms_list = [
        (-1.0) ** n * z ** (2 * n + 1) / ((2 * n + 1) * math.factorial(n))
        for n in range(terms)
    ]
    return 2.0 / _SQRT_PI * math.fsum(terms_list)


def test_erfc_at_zero():
    assert erfc(0.0) == 1.0


def test_erfc_series_oracle_at_one():
    # 30 series terms resolve erf(1) far below 1e-12
    assert erfc(1.0) == pytest.approx(1.0 - erf_series(1.0), rel=1e-13)
    assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-12)


@pytest.mark.parametrize("z", [0.3, 1.7, 4.2])
def test_erfc_reflection_spot(z):
    assert erfc(z) + erfc(-z) == pytest.approx(2.0, abs=1e-15)


def test_erfc_reflection_bulk():
    rng = np.random.default_rng(2024)
    zs = rng.uniform(-6.0, 6.0, 100_000)
    worst = max(abs(erfc(float(z)) + erfc(float(-z)) - 2.0) for z in zs)
    assert worst <= 1e-14


def test_erfc_vs_series_oracle_range():
    # per-term rounding limits the alternating series beyond |z| ~ 2.5, so
    # compare at the erf level on the range where the oracle is exact
    for z in np.linspace(0.05, 2.5, 40):
        z = float(z)
        assert 1.0 - erfc(z) == pytest.approx(erf_series(z, 40), rel=1e-12)


def test_erfc_vs_stdlib_dense():
    zs = np.linspace(-10.0, 10.0, 20_001)
    worst = max(
        abs(erfc(float(z)) - math.erfc(float(z))) / math.erfc(float(z)) for z in zs
    )
    assert worst <= 1e-12


def test_erfc_range_and_monotonicity():
    # strict behavior holds wherever 2 - erfc(-z) has not saturated; the
    # stdlib saturates identically (erfc(-6) == 2.0 in double precision)
    zs = np.linspace(-5.0, 10.0, 2001)
    vals = [erfc(float(z)) for z in zs]
    assert all(0.0 < v < 2.0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert erfc(-10.0) == 2.0 == math.erfc(-10.0)


def test_erfc_derivative_matches_gaussian():
    h = 1e-5
    for z in np.linspace(-3.0, 3.0, 61):
        z = float(z)
        fd = (erfc(z + h) - erfc(z - h)) / (2.0 * h)
        exact = -2.0 * math.exp(-z * z) / _SQRT_PI
        assert fd == pytest.approx(exact, rel=1e-6)


@given(st.floats(-10.0, 10.0))
def test_erfc_reflection_property(z):
    assert erfc(z) + erfc(-z) == pytest.approx(2.0, abs=1e-14)


def test_norm_cdf_at_zero():
    assert norm_cdf(0.0) == 0.5


def test_norm_cdf_tail_bound():
    assert norm_cdf(8.0) > 1.0 - 1e-14


def test_norm_cdf_consistency_with_erfc():
    for d in np.linspace(-8.0, 8.0, 201):
        d = float(d)
        assert norm_cdf(d) == 0.5 * erfc(-d / math.sqrt(2.0))


def test_norm_cdf_value_by_quadrature():
    # independent oracle: integrate the Gaussian density over [0, d]
    d = 0.10034
    tail = adaptive_simpson(norm_pdf, 0.0, d, 1e-13)
    assert norm_cdf(d) == pytest.approx(0.5 + tail, abs=1e-12)
    assert norm_cdf(d) == pytest.approx(0.53996, abs=5e-6)


@given(st.floats(-8.0, 8.0))
def test_norm_cdf_complement(d):
    assert norm_cdf(d) + norm_cdf(-d) == pytest.approx(1.0, abs=1e-14)


@given(st.floats(-6.0, 6.0), st.floats(1e-6, 2.0))
def test_norm_cdf_strictly_increasing(d, gap):
    assert norm_cdf(d + gap) > norm_cdf(d)


def test_norm_pdf_peak_and_symmetry():
    assert norm_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)
    assert norm_pdf(1.3) == norm_pdf(-1.3)
