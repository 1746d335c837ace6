import numpy as np
import pytest

from kinlab.grid import SpatialGrid, VelocityGrid


@pytest.fixture(scope="session")
def sgrid16():
    return SpatialGrid((16,), (2.0 * np.pi,))


@pytest.fixture(scope="session")
def sgrid64():
    return SpatialGrid((64,), (2.0 * np.pi,))


@pytest.fixture(scope="session")
def vgrid8():
    return VelocityGrid(8, 6.0)


@pytest.fixture(scope="session")
def vgrid12():
    return VelocityGrid(12, 6.0)


@pytest.fixture(scope="session")
def vgrid24():
    return VelocityGrid(24, 6.0)
