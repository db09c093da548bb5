import numpy as np
import pytest

from chiralcc.codes import build_boundary, build_chiral, build_xyz
from chiralcc.lattice import build_cube8, build_slab, build_sphere, build_tetra15, build_torus


@pytest.fixture(scope='session')
def cube8():
    return build_cube8()


@pytest.fixture(scope='session')
def tetra15():
    return build_tetra15()


@pytest.fixture(scope='session')
def sphere():
    return build_sphere()


@pytest.fixture(scope='session')
def torus():
    return build_torus(2, 2, 2)


@pytest.fixture(scope='session')
def slab():
    return build_slab(3, 3, 1)


@pytest.fixture(scope='session')
def xyz_torus(torus):
    return build_xyz(torus)


@pytest.fixture(scope='session')
def chiral3_torus(torus):
    return build_chiral(torus, 3, 1)


@pytest.fixture(scope='session')
def surface_code(slab):
    """Z_3^(1) boundary code on the bottom layer of the slab."""
    return build_boundary(slab, 'A', 'chiral', 3, 1, region='bottom')


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
