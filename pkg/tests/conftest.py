import pytest

from wgopuc.qseries import PrecisionContext, UnitPhase


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext()


@pytest.fixture(scope="session")
def golden():
    return UnitPhase.golden()


P_GRID = ("0.3", "0.5", "0.7")
