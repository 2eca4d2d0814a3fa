import pytest
from hypothesis import HealthCheck, settings

from bscontrol import MarketParams, PhysicalPoint

settings.register_profile(
    "ci",
    max_examples=75,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def market() -> MarketParams:
    """Study configuration used throughout: r=6%, sigma=30%, E=100, T=60 days."""
    return MarketParams.from_days(0.06, 0.3, 100.0, 60.0)


@pytest.fixture
def reference(market) -> PhysicalPoint:
    """Halfway-to-expiry at-the-money reference point."""
    return PhysicalPoint(S=100.0, t=30.0 / 365.0)
