import numpy as np
import pytest

from heatlab import GeometrySpec, build_geometry

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def circle256():
    return build_geometry(GeometrySpec("circle", 256, TWO_PI))


@pytest.fixture(scope="session")
def circle128():
    return build_geometry(GeometrySpec("circle", 128, TWO_PI))


@pytest.fixture(scope="session")
def circle64():
    return build_geometry(GeometrySpec("circle", 64, TWO_PI))


@pytest.fixture(scope="session")
def interval128():
    return build_geometry(GeometrySpec("interval", 128, np.pi))


@pytest.fixture(scope="session")
def interval512():
    return build_geometry(GeometrySpec("interval", 512, np.pi))


@pytest.fixture(scope="session")
def torus64():
    return build_geometry(GeometrySpec("torus2", (64, 64), (TWO_PI, TWO_PI)))


@pytest.fixture(scope="session")
def box64():
    return build_geometry(GeometrySpec("box2", (64, 64), (np.pi, np.pi)))


@pytest.fixture(scope="session")
def sphere64():
    return build_geometry(GeometrySpec("sphere2", (64, 128), 1.0))
