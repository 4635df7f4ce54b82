"""
Spin-1/2 builtins: Pauli matrices, axis projectors (1 ± sigma_j)/2,
their eigenstates, and the default Z/X/Y binding.
"""
from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import BindingFileError, InvalidState
from .hilbert import Projector, StateVector, make_state, validate_projector

SQRT_HALF = 1.0 / np.sqrt(2.0)

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# eigenstates written out instead of taken from eigh, so phases are fixed
_STATES = {
    "z+": (1.0, 0.0),
    "z-": (0.0, 1.0),
    "x+": (SQRT_HALF, SQRT_HALF),
    "x-": (SQRT_HALF, -SQRT_HALF),
    "y+": (SQRT_HALF, 1j * SQRT_HALF),
    "y-": (SQRT_HALF, -1j * SQRT_HALF),
}

BUILTIN_NAMES = tuple(_STATES)


def _split_name(name: str) -> Tuple[str, int]:
    key = (name or "").strip().lower()
    if key not in _STATES:
        raise KeyError(key)
    return key[0], (1 if key[1] == "+" else -1)


def projector_matrix(name: str) -> np.ndarray:
    axis, sign = _split_name(name)
    return (np.eye(2) + sign * PAULI[axis]) / 2


def builtin_projector(name: str, tol: Tolerances = DEFAULT_TOL) -> Projector:
    try:
        return validate_projector(projector_matrix(name), tol)
    except KeyError:
        raise BindingFileError(
            f"unknown builtin projector {name!r} (choose from {' '.join(BUILTIN_NAMES)})"
        ) from None


def builtin_state(name: str, tol: Tolerances = DEFAULT_TOL) -> StateVector:
    key = (name or "").strip().lower()
    if key not in _STATES:
        raise InvalidState(f"unknown builtin state {name!r} (choose from {' '.join(BUILTIN_NAMES)})")
    return make_state(np.array(_STATES[key], dtype=np.complex128), tol)


def spin_atoms(tol: Tolerances = DEFAULT_TOL) -> Dict[str, Projector]:
    """Atoms Z+ Z- X+ X- Y+ Y- bound to the builtin projectors."""
    return {name.upper(): builtin_projector(name, tol) for name in BUILTIN_NAMES}


def axis_context_pairs(axis: str, tol: Tolerances = DEFAULT_TOL):
    a = axis.lower()
    return [(f"{a}+", builtin_projector(f"{a}+", tol)), (f"{a}-", builtin_projector(f"{a}-", tol))]


def expansion_coefficients(state: StateVector, axis: str, tol: Tolerances = DEFAULT_TOL) -> Tuple[complex, complex]:
    """
    (c1, c2) with state = c1 |axis+> + c2 |axis->.
    """
    if state.dim != 2:
        raise InvalidState(f"expansion needs a spin-1/2 state, got dim {state.dim}")
    up = builtin_state(f"{axis}+", tol).amplitudes
    down = builtin_state(f"{axis}-", tol).amplitudes
    c1 = complex(np.vdot(up, state.amplitudes))
    c2 = complex(np.vdot(down, state.amplitudes))
    if abs(abs(c1) ** 2 + abs(c2) ** 2 - 1.0) > 2 * tol.alg:
        raise InvalidState(f"|c1|^2 + |c2|^2 = {abs(c1) ** 2 + abs(c2) ** 2:.12g}")
    return c1, c2
