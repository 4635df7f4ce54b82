import numpy as np
import pytest

from qsv.errors import BindingFileError, InvalidState
from qsv.lattice import join, meet, xjoin
from qsv.spin import SQRT_HALF, axis_context_pairs, builtin_projector, builtin_state, expansion_coefficients, projector_matrix

GOLDEN = {
    "z+": [[1, 0], [0, 0]],
    "z-": [[0, 0], [0, 1]],
    "x+": [[0.5, 0.5], [0.5, 0.5]],
    "x-": [[0.5, -0.5], [-0.5, 0.5]],
    "y+": [[0.5, -0.5j], [0.5j, 0.5]],
    "y-": [[0.5, 0.5j], [-0.5j, 0.5]],
}


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_builtin_projectors_match_golden(name):
    p = builtin_projector(name)
    assert p.rank == 1
    assert np.max(np.abs(p.entries - np.array(GOLDEN[name]))) <= 1e-12


def test_names_are_case_insensitive():
    assert np.array_equal(projector_matrix("X+"), projector_matrix("x+"))


def test_x_context_operations(tol):
    up, down = builtin_projector("x+"), builtin_projector("x-")
    assert np.max(np.abs(meet(up, down, tol).entries)) <= tol.alg
    assert np.max(np.abs(join(up, down, tol).entries - np.eye(2))) <= tol.alg
    assert np.max(np.abs(xjoin(up, down, tol).entries - np.eye(2))) <= tol.alg


@pytest.mark.parametrize("name", ["z+", "z-", "x+", "x-", "y+", "y-"])
def test_builtin_states_are_eigenvectors(name):
    v = builtin_state(name).amplitudes
    p = projector_matrix(name)
    assert np.allclose(p @ v, v, atol=1e-12)


def test_z_up_in_the_x_basis():
    c1, c2 = expansion_coefficients(builtin_state("z+"), "x")
    assert c1 == pytest.approx(SQRT_HALF, abs=1e-12)
    assert c2 == pytest.approx(SQRT_HALF, abs=1e-12)
    assert abs(c1) ** 2 + abs(c2) ** 2 == pytest.approx(1.0)


def test_expansion_in_the_y_basis_is_complex():
    c1, c2 = expansion_coefficients(builtin_state("x+"), "y")
    assert abs(c1) == pytest.approx(SQRT_HALF)
    assert abs(c2) == pytest.approx(SQRT_HALF)


def test_axis_context_pairs_labels():
    labels = [label for label, _ in axis_context_pairs("Z")]
    assert labels == ["z+", "z-"]


def test_unknown_builtins():
    with pytest.raises(BindingFileError):
        builtin_projector("w+")
    with pytest.raises(InvalidState):
        builtin_state("up")
