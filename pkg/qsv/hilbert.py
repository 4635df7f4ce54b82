"""
Dense complex-matrix and state-vector kernels.

Everything here is a small dense numpy array wrapped in a frozen dataclass.
Arrays are copied on construction and flagged read-only, so values can be
shared freely.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TOL, EIGEN_SPLIT, Tolerances
from .errors import (
    DecompositionFailure,
    DimensionMismatch,
    DimensionTooLarge,
    InvalidState,
    NotHermitian,
    NotIdempotent,
)

ArrayLike = Union[np.ndarray, Sequence]


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


# -----------------------------
# Types
# -----------------------------
@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DecompositionFailure(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DecompositionFailure("matrix has NaN/Inf entries")
        object.__setattr__(self, "entries", _frozen(a))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True, eq=False)
class Projector:
    matrix: ComplexMatrix
    rank: int

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    def is_zero(self) -> bool:
        return self.rank == 0

    def is_identity(self) -> bool:
        return self.rank == self.dim

    def __repr__(self) -> str:
        return f"Projector(dim={self.dim}, rank={self.rank})"


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes)
        if a.ndim != 1 or a.shape[0] < 1:
            raise InvalidState(f"expected a non-empty 1-D amplitude vector, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidState("state has NaN/Inf amplitudes")
        n = float(np.linalg.norm(a))
        if abs(n - 1.0) > self.tol.alg:
            raise InvalidState(f"state is not normalized: |v| = {n:.12g}")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_phase(self, theta: float) -> "StateVector":
        return StateVector(np.exp(1j * theta) * self.amplitudes, self.tol)


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient_dim: int
    basis: np.ndarray  # (ambient_dim, k), orthonormal columns
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.size == 0:
            b = np.zeros((self.ambient_dim, 0), dtype=np.complex128)
        elif b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise DimensionMismatch(self.ambient_dim, b.shape[0], "basis")
        if b.shape[1] > self.ambient_dim:
            raise DecompositionFailure(f"{b.shape[1]} basis vectors in dimension {self.ambient_dim}")
        gram_err = max_abs(b.conj().T @ b - np.eye(b.shape[1]))
        if gram_err > self.tol.alg:
            raise DecompositionFailure(f"basis is not orthonormal (gram residual {gram_err:.3e})")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def projector_matrix(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


# -----------------------------
# Constructors
# -----------------------------
def _check_cap(dim: int, tol: Tolerances) -> None:
    if dim > tol.max_dim:
        raise DimensionTooLarge(dim, tol.max_dim)


def make_state(amplitudes: ArrayLike, tol: Tolerances = DEFAULT_TOL, normalize: bool = False) -> StateVector:
    a = np.asarray(amplitudes, dtype=np.complex128).ravel()
    if a.size:
        _check_cap(a.size, tol)
    n = float(np.linalg.norm(a)) if a.size else 0.0
    if n == 0.0:
        raise InvalidState("zero vector is not a state")
    if not normalize and abs(n - 1.0) > tol.alg:
        raise InvalidState(f"state is not normalized: |v| = {n:.12g}")
    return StateVector(a / n, tol)


def validate_projector(m: Union[ComplexMatrix, ArrayLike], tol: Tolerances = DEFAULT_TOL) -> Projector:
    cm = m if isinstance(m, ComplexMatrix) else ComplexMatrix(np.asarray(m, dtype=np.complex128))
    _check_cap(cm.dim, tol)
    a = cm.entries

    herm = max_abs(a - a.conj().T)
    if herm > tol.alg:
        raise NotHermitian(herm, tol.alg)
    idem = max_abs(a @ a - a)
    if idem > tol.alg:
        raise NotIdempotent(idem, tol.alg)

    evals = _eigvalsh(a)
    return Projector(cm, int(np.count_nonzero(evals > EIGEN_SPLIT)))


def snap_projector(m: ArrayLike, tol: Tolerances = DEFAULT_TOL) -> Projector:
    """
    Nearest exact projector to a computed one. Eigenvalues are rounded to 0/1
    and the matrix is rebuilt from the eigenvectors, so lattice results stay
    exact however deep a formula nests.
    """
    a = np.asarray(m, dtype=np.complex128)
    cm = ComplexMatrix(a)
    _check_cap(cm.dim, tol)
    slack = float(np.sqrt(tol.alg))
    herm = max_abs(a - a.conj().T)
    if herm > slack:
        raise NotHermitian(herm, slack)
    evals, evecs = _eigh(a)
    upper = evals > EIGEN_SPLIT
    drift = max_abs(evals - upper)
    if drift > slack:
        raise NotIdempotent(drift, slack)
    v = evecs[:, upper]
    return Projector(ComplexMatrix(v @ v.conj().T), int(np.count_nonzero(upper)))


def identity(dim: int) -> Projector:
    return Projector(ComplexMatrix(np.eye(dim)), dim)


def zero(dim: int) -> Projector:
    return Projector(ComplexMatrix(np.zeros((dim, dim))), 0)


# -----------------------------
# Decompositions
# -----------------------------
def _hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(_hermitian_part(a))
    except np.linalg.LinAlgError as e:
        raise DecompositionFailure(f"eigvalsh failed: {e}") from e


def _eigh(a: np.ndarray):
    try:
        return np.linalg.eigh(_hermitian_part(a))
    except np.linalg.LinAlgError as e:
        raise DecompositionFailure(f"eigh failed: {e}") from e


def _split_spectrum(p: Projector):
    evals, evecs = _eigh(p.entries)
    upper = evals > EIGEN_SPLIT
    if int(np.count_nonzero(upper)) != p.rank:
        raise DecompositionFailure(
            f"eigenvalue count above {EIGEN_SPLIT} is {int(np.count_nonzero(upper))}, rank is {p.rank}"
        )
    return evecs[:, upper], evecs[:, ~upper]


def split_bases(p: Projector, tol: Tolerances = DEFAULT_TOL) -> Tuple[Subspace, Subspace]:
    """(range_basis(p), kernel_basis(p)) from a single eigendecomposition."""
    ran, ker = _split_spectrum(p)
    return Subspace(p.dim, ran, tol), Subspace(p.dim, ker, tol)


def range_basis(p: Projector, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    ran, _ = _split_spectrum(p)
    return Subspace(p.dim, ran, tol)


def kernel_basis(p: Projector, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    # eigenvalue-0 eigenspace of P is the eigenvalue-1 eigenspace of 1 - P
    _, ker = _split_spectrum(p)
    return Subspace(p.dim, ker, tol)


# -----------------------------
# State-level queries
# -----------------------------
def membership_residual(v: StateVector, s: Subspace) -> float:
    """||v - Proj_s(v)||, the distance of v from span(basis)."""
    if v.dim != s.ambient_dim:
        raise DimensionMismatch(s.ambient_dim, v.dim, "state")
    x = v.amplitudes
    if s.dim == 0:
        return float(np.linalg.norm(x))
    b = s.basis
    return float(np.linalg.norm(x - b @ (b.conj().T @ x)))


def member(v: StateVector, s: Subspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return membership_residual(v, s) <= tol.member


def expectation(v: StateVector, p: Projector, tol: Tolerances = DEFAULT_TOL) -> float:
    if v.dim != p.dim:
        raise DimensionMismatch(p.dim, v.dim, "state")
    x = v.amplitudes
    r = float(np.real(np.vdot(x, p.entries @ x)))
    if r < -p.dim * tol.alg or r > 1.0 + p.dim * tol.alg:
        raise DecompositionFailure(f"Born degree {r:.6g} outside [0, 1]")
    return min(1.0, max(0.0, r))


def same_operator(a: np.ndarray, b: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    return max_abs(np.asarray(a) - np.asarray(b)) <= tol.alg
