import numpy as np
import pytest

from geopursuit import (
    Euclidean,
    FlatTorus,
    MobiusBand,
    ProjectivePlane,
    Sphere,
    SurfaceOfRevolution,
)


@pytest.fixture(scope="session")
def euclid2():
    return Euclidean(2)


@pytest.fixture(scope="session")
def euclid3():
    return Euclidean(3)


@pytest.fixture(scope="session")
def torus():
    return FlatTorus()


@pytest.fixture(scope="session")
def mobius():
    return MobiusBand()


@pytest.fixture(scope="session")
def sphere():
    return Sphere()


@pytest.fixture(scope="session")
def rp2():
    return ProjectivePlane()


@pytest.fixture(scope="session")
def dumbbell():
    return SurfaceOfRevolution()


def close_pair(space, rng, frac=0.9):
    """Random (p, q) with dist(p, q) < frac * inj, q != p."""
    inj = space.injectivity_radius
    cap = frac * inj if np.isfinite(inj) else frac
    while True:
        p = space.random_point(rng)
        q = space.random_point(rng)
        try:
            d = space.dist(p, q)
        except Exception:
            continue
        if 1e-6 < d < cap:
            return p, q
