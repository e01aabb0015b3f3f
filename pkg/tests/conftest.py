import pytest

from sfrkit import DerivedParams, SystemConditions


@pytest.fixture
def base_system():
    """Canonical under-frequency case: D' = 80 MW/Hz, H = 180 MW.s/Hz."""
    return SystemConditions(f_n=50.0, ke=9000.0, p_load=2000.0, d=0.04, p_cont=300.0)


@pytest.fixture
def security_dp():
    """Conditions for the contingency-cap examples: D' = 100, H = 140."""
    return DerivedParams(dprime=100.0, h=140.0)
