import pytest

from obkit.geometry import ball, box, cusp
from obkit.quadrature import QuadratureSpec
from obkit.young import power


@pytest.fixture(scope="session")
def unit_ball():
    return ball((0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def unit_box():
    return box((0.0, 0.0), (1.0, 1.0))


@pytest.fixture(scope="session")
def spike():
    return cusp(2.0)


@pytest.fixture(scope="session")
def phi15():
    return power(1.5)


@pytest.fixture(scope="session")
def spec():
    return QuadratureSpec(seed=42)


@pytest.fixture(scope="session")
def spec_big():
    return QuadratureSpec(seed=42, n_outer=4096, n_radial=96)
