import pytest

from pvdispatch import BatteryParams


@pytest.fixture
def params():
    return BatteryParams()
