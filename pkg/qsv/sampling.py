"""
Random projectors, states and formulas for audits and property tests.
"""
from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .hilbert import Projector, StateVector, make_state, validate_projector
from .logic import And, Atom, Formula, Not, Or, Xor


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_bits(dim: int, rng: np.random.Generator, nontrivial: bool = True) -> np.ndarray:
    if not nontrivial:
        return rng.integers(0, 2, size=dim)
    if dim < 2:
        raise ValueError("a nontrivial projector needs dim >= 2")
    rank = int(rng.integers(1, dim))
    bits = np.zeros(dim, dtype=int)
    bits[rng.permutation(dim)[:rank]] = 1
    return bits


def projector_from(u: np.ndarray, bits: Sequence[int], tol: Tolerances = DEFAULT_TOL) -> Projector:
    m = u @ np.diag(np.asarray(bits, dtype=float)) @ u.conj().T
    return validate_projector((m + m.conj().T) / 2, tol)


def random_projector(dim: int, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL,
                     nontrivial: bool = True) -> Projector:
    return projector_from(random_unitary(dim, rng), random_bits(dim, rng, nontrivial), tol)


def random_commuting(dim: int, count: int, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL,
                     nontrivial: bool = True) -> List[Projector]:
    """`count` projectors diagonal in one shared random basis."""
    u = random_unitary(dim, rng)
    return [projector_from(u, random_bits(dim, rng, nontrivial), tol) for _ in range(count)]


def random_state(dim: int, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL) -> StateVector:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return make_state(z, tol, normalize=True)


def random_formula(names: Sequence[str], depth: int, rng: np.random.Generator,
                   leaf_p: Optional[float] = None) -> Formula:
    if depth <= 0 or (leaf_p is not None and rng.random() < leaf_p):
        return Atom(str(names[int(rng.integers(len(names)))]))
    kind = int(rng.integers(4))
    if kind == 0:
        return Not(random_formula(names, depth - 1, rng, leaf_p if leaf_p is not None else 0.3))
    cls = (And, Or, Xor)[kind - 1]
    sub = leaf_p if leaf_p is not None else 0.3
    return cls(random_formula(names, depth - 1, rng, sub), random_formula(names, depth - 1, rng, sub))
