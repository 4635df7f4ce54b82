"""
Contexts of commuting projectors and the lattice operations on them.

meet/join/xjoin are only defined inside a context. For a non-commuting pair
they raise NonCommuting instead of falling back to subspace intersection or
span: connectives across contexts carry no meaning here, and callers route
such compounds through the cross-context rules in qsv.valuation.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOL, EIGEN_SPLIT, Tolerances
from .errors import (
    DecompositionFailure,
    DimensionMismatch,
    InvalidContext,
    NonCommuting,
    TrivialMember,
)
from .hilbert import ComplexMatrix, Projector, Subspace, max_abs, snap_projector


def _same_dim(p: Projector, q: Projector) -> None:
    if p.dim != q.dim:
        raise DimensionMismatch(p.dim, q.dim, "projector")


def commutator_residual(p: Projector, q: Projector) -> float:
    _same_dim(p, q)
    a, b = p.entries, q.entries
    return max_abs(a @ b - b @ a)


def commutes(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL) -> bool:
    return commutator_residual(p, q) <= tol.alg


def _require_commuting(p: Projector, q: Projector, tol: Tolerances, names=("p", "q")) -> None:
    r = commutator_residual(p, q)
    if r > tol.alg:
        raise NonCommuting(names[0], names[1], r)


def _product(p: Projector, q: Projector) -> np.ndarray:
    # (PQ + QP)/2 is exactly Hermitian and equals PQ for commuting P, Q
    a, b = p.entries, q.entries
    return (a @ b + b @ a) / 2


# -----------------------------
# Lattice operations
# -----------------------------
def meet(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL, check: bool = True) -> Projector:
    if check:
        _require_commuting(p, q, tol)
    return snap_projector(_product(p, q), tol)


def join(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL, check: bool = True) -> Projector:
    if check:
        _require_commuting(p, q, tol)
    return snap_projector(p.entries + q.entries - _product(p, q), tol)


def complement(p: Projector) -> Projector:
    return Projector(ComplexMatrix(np.eye(p.dim) - p.entries), p.dim - p.rank)


def xjoin(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL, check: bool = True) -> Projector:
    """(p join q) meet (1 - p meet q)."""
    if check:
        _require_commuting(p, q, tol)
    return meet(join(p, q, tol, False), complement(meet(p, q, tol, False)), tol, False)


def leq(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Meet form of the order: PQ = P."""
    _require_commuting(p, q, tol)
    return max_abs(_product(p, q) - p.entries) <= tol.alg


def leq_join_form(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Join form of the order: P + Q - PQ = Q."""
    _require_commuting(p, q, tol)
    return max_abs(join(p, q, tol, False).entries - q.entries) <= tol.alg


def orthogonal(p: Projector, q: Projector, tol: Tolerances = DEFAULT_TOL) -> bool:
    _same_dim(p, q)
    return max_abs(p.entries @ q.entries) <= tol.alg


# -----------------------------
# Contexts
# -----------------------------
@dataclass(frozen=True)
class PairRelation:
    left: str
    right: str
    orthogonal: bool
    left_leq_right: bool
    right_leq_left: bool


@dataclass(frozen=True, eq=False)
class Context:
    ambient_dim: int
    members: Mapping[str, Projector]
    relations: Tuple[PairRelation, ...] = ()

    @property
    def labels(self) -> List[str]:
        return list(self.members)

    def relation(self, a: str, b: str) -> PairRelation:
        for r in self.relations:
            if (r.left, r.right) == (a, b):
                return r
            if (r.left, r.right) == (b, a):
                return PairRelation(a, b, r.orthogonal, r.right_leq_left, r.left_leq_right)
        raise KeyError((a, b))


def make_context(pairs: Iterable[Tuple[str, Projector]], tol: Tolerances = DEFAULT_TOL) -> Context:
    items = list(pairs.items()) if isinstance(pairs, Mapping) else list(pairs)
    if not items:
        raise InvalidContext("a context needs at least one projector")

    labels = [label for label, _ in items]
    dupes = sorted({x for x in labels if labels.count(x) > 1})
    if dupes:
        raise InvalidContext("duplicate context labels: " + ", ".join(dupes))

    dim = items[0][1].dim
    for label, p in items:
        if p.dim != dim:
            raise DimensionMismatch(dim, p.dim, f"context member {label!r}")
        if p.is_zero():
            raise TrivialMember(label, "0")
        if p.is_identity():
            raise TrivialMember(label, "1")

    relations = []
    for i, (a, p) in enumerate(items):
        for b, q in items[i + 1:]:
            _require_commuting(p, q, tol, (a, b))
            relations.append(PairRelation(a, b, orthogonal(p, q, tol), leq(p, q, tol), leq(q, p, tol)))

    return Context(dim, MappingProxyType(dict(items)), tuple(relations))


# -----------------------------
# Joint eigenstructure
# -----------------------------
@dataclass(frozen=True, eq=False)
class Block:
    subspace: Subspace
    assignment: Mapping[str, int]

    def projector(self) -> Projector:
        return Projector(ComplexMatrix(self.subspace.projector_matrix()), self.subspace.dim)


@dataclass(frozen=True, eq=False)
class JointEigenstructure:
    ambient_dim: int
    blocks: Tuple[Block, ...]

    def reconstruct(self, label: str) -> np.ndarray:
        out = np.zeros((self.ambient_dim, self.ambient_dim), dtype=np.complex128)
        for blk in self.blocks:
            if blk.assignment[label]:
                out = out + blk.subspace.projector_matrix()
        return out


def _split_block(basis: np.ndarray, p: Projector, tol: Tolerances):
    """Split span(basis) into its parts inside ran(p) and ker(p)."""
    restricted = basis.conj().T @ p.entries @ basis
    try:
        evals, evecs = np.linalg.eigh((restricted + restricted.conj().T) / 2)
    except np.linalg.LinAlgError as e:
        raise DecompositionFailure(f"eigh failed on a {basis.shape[1]}-dim block: {e}") from e
    bad = np.abs(evals - np.round(evals))
    if bad.size and float(bad.max()) > np.sqrt(tol.alg):
        raise DecompositionFailure(
            f"block is not invariant under the projector (eigenvalue {evals[int(bad.argmax())]:.6g})"
        )
    upper = evals > EIGEN_SPLIT
    return basis @ evecs[:, upper], basis @ evecs[:, ~upper]


def common_eigenspaces(
    members: Sequence[Tuple[str, Projector]], dim: int, tol: Tolerances = DEFAULT_TOL
) -> JointEigenstructure:
    """
    Refine the whole space one projector at a time (split each block into
    its ran/ker parts). Members may be trivial; they only need to commute.
    Blocks come out with the 1-part before the 0-part at every split.
    """
    blocks: List[Tuple[np.ndarray, dict]] = [(np.eye(dim, dtype=np.complex128), {})]
    for label, p in members:
        if p.dim != dim:
            raise DimensionMismatch(dim, p.dim, f"member {label!r}")
        refined = []
        for basis, bits in blocks:
            ran, ker = _split_block(basis, p, tol)
            if ran.shape[1]:
                refined.append((ran, {**bits, label: 1}))
            if ker.shape[1]:
                refined.append((ker, {**bits, label: 0}))
        blocks = refined

    es = JointEigenstructure(
        dim,
        tuple(Block(Subspace(dim, b, tol), MappingProxyType(bits)) for b, bits in blocks),
    )
    for label, p in members:
        err = max_abs(es.reconstruct(label) - p.entries)
        if err > tol.alg:
            raise DecompositionFailure(f"blocks do not reproduce {label!r} (residual {err:.3e})")
    return es


def joint_eigenstructure(c: Context, tol: Tolerances = DEFAULT_TOL) -> JointEigenstructure:
    return common_eigenspaces(list(c.members.items()), c.ambient_dim, tol)
