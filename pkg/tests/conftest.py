import pytest

from eesscoex.deployment import load_bundled_counties
from eesscoex.linkbudget import load_sensor_catalog


@pytest.fixture(scope="session")
def catalog():
    return load_sensor_catalog()


@pytest.fixture(scope="session")
def counties():
    return load_bundled_counties().records
