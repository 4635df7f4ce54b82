import numpy as np
import pytest

from qsv.config import Tolerances
from qsv.logic import make_binding
from qsv.spin import builtin_state, spin_atoms


@pytest.fixture
def tol():
    return Tolerances()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def spin(tol):
    """Atoms Z+ Z- X+ X- Y+ Y- as projectors."""
    return spin_atoms(tol)


@pytest.fixture
def spin_binding(spin):
    return make_binding(spin)


@pytest.fixture
def z_up(tol):
    return builtin_state("z+", tol)
