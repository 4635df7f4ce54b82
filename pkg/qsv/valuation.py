"""
Truth assignments over (state, formula) pairs.

bivalent    True iff v in ran(P), False iff v in ker(P), otherwise Undefined.
            Compounds are truth-functional (min / max / 1 - x).
degree      Born degree <v|P|v> of the compiled operator.
super       Single-context formulas: membership of v in ran/ker of the
            compiled operator, Gap otherwise. Cross-context compounds combine
            definite operands classically; any Gap/NoValue operand gives NoValue.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import QsvError
from .hilbert import (
    Projector,
    StateVector,
    expectation,
    max_abs,
    membership_residual,
    split_bases,
)
from .lattice import commutes, complement, join, meet, xjoin
from .logic import (
    And,
    Atom,
    Binding,
    BoundFormula,
    CrossContext,
    Formula,
    Not,
    Or,
    atoms,
    bind,
    children,
    precisification_projector,
    render,
    subformulas,
)


# -----------------------------
# Truth statuses
# -----------------------------
class Kind(str, Enum):
    TRUE = "true"
    FALSE = "false"
    GAP = "gap"
    NO_VALUE = "no-value"
    DEGREE = "degree"


@dataclass(frozen=True)
class TruthStatus:
    kind: Kind
    degree: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is Kind.DEGREE:
            if self.degree is None or not np.isfinite(self.degree) or not 0.0 <= self.degree <= 1.0:
                raise QsvError(f"degree must be a finite number in [0, 1], got {self.degree!r}")
        elif self.degree is not None:
            raise QsvError(f"{self.kind.value} carries no degree")

    @staticmethod
    def true() -> "TruthStatus":
        return TruthStatus(Kind.TRUE)

    @staticmethod
    def false() -> "TruthStatus":
        return TruthStatus(Kind.FALSE)

    @staticmethod
    def gap() -> "TruthStatus":
        return TruthStatus(Kind.GAP)

    @staticmethod
    def no_value() -> "TruthStatus":
        return TruthStatus(Kind.NO_VALUE)

    @staticmethod
    def of_degree(r: float) -> "TruthStatus":
        return TruthStatus(Kind.DEGREE, float(r))

    @staticmethod
    def from_bool(b: bool) -> "TruthStatus":
        return TruthStatus.true() if b else TruthStatus.false()

    def is_definite(self) -> bool:
        return self.kind in (Kind.TRUE, Kind.FALSE)

    def to_bool(self) -> bool:
        if not self.is_definite():
            raise QsvError(f"{self.kind.value} has no classical value")
        return self.kind is Kind.TRUE

    def label(self) -> str:
        return f"degree {self.degree:.12g}" if self.kind is Kind.DEGREE else self.kind.value

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.kind is Kind.DEGREE:
            out["degree"] = self.degree
        return out


@dataclass(frozen=True)
class Undefined:
    """Bivalent semantics declines: the state is in neither ran(P) nor ker(P)."""
    range_residual: float
    kernel_residual: float
    atom: Optional[str] = None

    def label(self) -> str:
        return "undefined"

    def is_definite(self) -> bool:
        return False

    def to_dict(self) -> dict:
        out = {"kind": "undefined", "range_residual": self.range_residual,
               "kernel_residual": self.kernel_residual}
        if self.atom is not None:
            out["atom"] = self.atom
        return out


Status = Union[TruthStatus, Undefined]


# -----------------------------
# Reports
# -----------------------------
def matrix_to_json(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a)]


def vector_to_json(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a)]


@dataclass(frozen=True)
class TraceEntry:
    subformula: str
    status: Status
    justification: str

    def to_dict(self) -> dict:
        return {"subformula": self.subformula, "status": self.status.to_dict(),
                "justification": self.justification}


@dataclass(frozen=True)
class ValuationReport:
    formula: str
    semantics: str
    status: Status
    trace: Tuple[TraceEntry, ...] = ()
    operator: Optional[Projector] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "semantics": self.semantics,
            "status": self.status.to_dict(),
            "trace": [t.to_dict() for t in self.trace],
            "operator": None if self.operator is None else matrix_to_json(self.operator.entries),
        }


# -----------------------------
# Bivalent
# -----------------------------
def _residuals(v: StateVector, p: Projector, tol: Tolerances = DEFAULT_TOL) -> Tuple[float, float]:
    ran, ker = split_bases(p, tol)
    return membership_residual(v, ran), membership_residual(v, ker)


def valuate_bivalent(v: StateVector, p: Projector, tol: Tolerances = DEFAULT_TOL) -> Status:
    ran_r, ker_r = _residuals(v, p, tol)
    if ran_r <= tol.member:
        return TruthStatus.true()
    if ker_r <= tol.member:
        return TruthStatus.false()
    return Undefined(ran_r, ker_r)


def _membership_note(p: Projector, status: Status) -> str:
    if isinstance(status, Undefined):
        return (f"state in neither ran nor ker (distances {status.range_residual:.3g}, "
                f"{status.kernel_residual:.3g})")
    if p.is_identity():
        return "operator is 1: true in every state"
    if p.is_zero():
        return "operator is 0: false in every state"
    if status.kind is Kind.TRUE:
        return f"state in ran (rank {p.rank})"
    return f"state in ker (rank {p.rank})"


def _classical(node: Formula, values: Sequence[bool]) -> bool:
    if isinstance(node, Not):
        return not values[0]
    if isinstance(node, And):
        return all(values)
    if isinstance(node, Or):
        return any(values)
    return values[0] != values[1]


def valuate_bivalent_formula(v: StateVector, bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> ValuationReport:
    """Truth-functional reading over bivalently valued atoms."""
    memo: Dict[int, Status] = {}
    trace: List[TraceEntry] = []
    for node in subformulas(bf.formula):
        if id(node) in memo:
            status = memo[id(node)]
            trace.append(TraceEntry(render(node), status, "repeated subformula"))
            continue
        if isinstance(node, Atom):
            p = bf.projector(node.name)
            status = valuate_bivalent(v, p, tol)
            if isinstance(status, Undefined):
                status = Undefined(status.range_residual, status.kernel_residual, node.name)
            note = _membership_note(p, status)
        else:
            parts = [memo[id(c)] for c in children(node)]
            undefined = next((s for s in parts if isinstance(s, Undefined)), None)
            if undefined is not None:
                status = undefined
                note = f"operand {undefined.atom} has no bivalent value"
            else:
                status = TruthStatus.from_bool(_classical(node, [s.to_bool() for s in parts]))
                note = "classical table (min / max / 1 - x)"
        memo[id(node)] = status
        trace.append(TraceEntry(render(node), status, note))
    return ValuationReport(render(bf.formula), "bivalent", memo[id(bf.formula)], tuple(trace))


# -----------------------------
# Shared single-context machinery
# -----------------------------
class _Scope:
    """Per-evaluation cache of atom commutation and compiled operators."""

    def __init__(self, bf: BoundFormula, tol: Tolerances):
        self.bf = bf
        self.tol = tol
        self.pairs: Dict[Tuple[str, str], bool] = {}
        self.ops: Dict[int, Optional[Projector]] = {}
        self.names: Dict[int, List[str]] = {}

    def _commute(self, a: str, b: str) -> bool:
        key = (a, b) if a <= b else (b, a)
        if key not in self.pairs:
            self.pairs[key] = commutes(self.bf.projector(a), self.bf.projector(b), self.tol)
        return self.pairs[key]

    def cross_pair(self, node: Formula) -> Optional[CrossContext]:
        names = self.names.setdefault(id(node), atoms(node))
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                if not self._commute(a, b):
                    return CrossContext(a, b)
        return None

    def operator(self, node: Formula) -> Optional[Projector]:
        """Compiled projector of node, or None if its atoms span contexts."""
        key = id(node)
        if key in self.ops:
            return self.ops[key]
        if self.cross_pair(node) is not None:
            op = None
        elif isinstance(node, Atom):
            op = self.bf.projector(node.name)
        elif isinstance(node, Not):
            op = complement(self.operator(node.operand))
        else:
            l, r = self.operator(node.left), self.operator(node.right)
            fn = meet if isinstance(node, And) else join if isinstance(node, Or) else xjoin
            # cross_pair(node) is None, so every atom below node commutes
            op = fn(l, r, self.tol, False)
        self.ops[key] = op
        return op


# -----------------------------
# Degree
# -----------------------------
def valuate_degree(v: StateVector, bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> ValuationReport:
    scope = _Scope(bf, tol)
    trace: List[TraceEntry] = []
    for node in subformulas(bf.formula):
        op = scope.operator(node)
        if op is None:
            cross = scope.cross_pair(node)
            trace.append(TraceEntry(render(node), TruthStatus.no_value(),
                                    f"no degree across contexts: {cross}"))
        else:
            r = expectation(v, op, tol)
            trace.append(TraceEntry(render(node), TruthStatus.of_degree(r),
                                    f"<v|P|v> of compiled operator (rank {op.rank})"))
    return ValuationReport(render(bf.formula), "degree", trace[-1].status, tuple(trace),
                           scope.operator(bf.formula))


# -----------------------------
# Supervaluation
# -----------------------------
def _super_status(v: StateVector, p: Projector, tol: Tolerances) -> Tuple[TruthStatus, str]:
    s = valuate_bivalent(v, p, tol)
    note = _membership_note(p, s)
    return (TruthStatus.gap() if isinstance(s, Undefined) else s), note


def valuate_super(v: StateVector, bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> ValuationReport:
    scope = _Scope(bf, tol)
    memo: Dict[int, TruthStatus] = {}
    trace: List[TraceEntry] = []
    for node in subformulas(bf.formula):
        op = scope.operator(node)
        if op is not None:
            status, note = _super_status(v, op, tol)
        else:
            parts = [memo[id(c)] for c in children(node)]
            if all(s.is_definite() for s in parts):
                status = TruthStatus.from_bool(_classical(node, [s.to_bool() for s in parts]))
                note = f"across contexts ({scope.cross_pair(node)}): classical table on definite operands"
            else:
                status = TruthStatus.no_value()
                lacking = ", ".join(sorted({s.kind.value for s in parts if not s.is_definite()}))
                note = f"across contexts ({scope.cross_pair(node)}): operand is {lacking}"
        memo[id(node)] = status
        trace.append(TraceEntry(render(node), status, note))
    return ValuationReport(render(bf.formula), "super", memo[id(bf.formula)], tuple(trace),
                           scope.operator(bf.formula))


SEMANTICS = {
    "bivalent": valuate_bivalent_formula,
    "degree": valuate_degree,
    "super": valuate_super,
}


def valuate(semantics: str, v: StateVector, bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> ValuationReport:
    try:
        fn = SEMANTICS[semantics]
    except KeyError:
        raise QsvError(f"unknown semantics {semantics!r} (choose from {', '.join(SEMANTICS)})") from None
    return fn(v, bf, tol)


def block_membership_status(v: StateVector, bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> Optional[TruthStatus]:
    """
    Supervaluation status read off the joint eigenspaces directly: sum the
    blocks where the formula is classically true, then test membership.
    None for cross-context formulas.
    """
    op = precisification_projector(bf, tol)
    if isinstance(op, CrossContext):
        return None
    return _super_status(v, op, tol)[0]


# -----------------------------
# Laws
# -----------------------------
class Law(str, Enum):
    EXCLUDED_MIDDLE = "excluded-middle"
    NON_CONTRADICTION = "non-contradiction"
    DISTRIBUTIVITY = "distributivity"


EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not-equivalent"
MEANINGLESS = "equivalence-meaningless"


@dataclass(frozen=True)
class LawReport:
    law: Law
    atoms: Tuple[str, ...]
    reports: Tuple[ValuationReport, ...]
    holds: bool
    verdict: str
    operator_identity: Optional[str] = None

    @property
    def statuses(self) -> Tuple[TruthStatus, ...]:
        return tuple(r.status for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "law": self.law.value,
            "atoms": list(self.atoms),
            "holds": self.holds,
            "verdict": self.verdict,
            "operator_identity": self.operator_identity,
            "sides": [r.to_dict() for r in self.reports],
        }


def _law_atoms(law: Law, names: Sequence[str]) -> Tuple[str, ...]:
    need = {Law.EXCLUDED_MIDDLE: (1, 1), Law.NON_CONTRADICTION: (1, 1), Law.DISTRIBUTIVITY: (2, 3)}[law]
    if not need[0] <= len(names) <= need[1]:
        raise QsvError(f"{law.value} takes {need[0]}" + (f"-{need[1]}" if need[1] != need[0] else "")
                       + f" atoms, got {len(names)}")
    return tuple(names)


def _distributive_sides(z: Formula, x: Formula, y: Formula) -> Tuple[Formula, Formula]:
    return And(z, Or(x, y)), Or(And(z, x), And(z, y))


def check_law(law: Union[Law, str], v: StateVector, b: Binding, names: Sequence[str],
              tol: Tolerances = DEFAULT_TOL) -> LawReport:
    law = Law(law)
    names = _law_atoms(law, names)

    if law in (Law.EXCLUDED_MIDDLE, Law.NON_CONTRADICTION):
        a = Atom(names[0])
        f = Or(a, Not(a)) if law is Law.EXCLUDED_MIDDLE else And(a, Not(a))
        report = valuate_super(v, bind(f, b), tol)
        p = b.atoms[names[0]]
        if law is Law.EXCLUDED_MIDDLE:
            op, want, target = join(p, complement(p), tol), Kind.TRUE, np.eye(p.dim)
            ident = f"{names[0]} join (1 - {names[0]}) = 1"
        else:
            op, want, target = meet(p, complement(p), tol), Kind.FALSE, np.zeros((p.dim, p.dim))
            ident = f"{names[0]} meet (1 - {names[0]}) = 0"
        identity_ok = max_abs(op.entries - target) <= tol.alg
        holds = identity_ok and report.status.kind is want
        return LawReport(law, names, (report,), holds, "valid" if holds else "violated",
                         ident if identity_ok else f"FAILED: {ident}")

    z, x = Atom(names[0]), Atom(names[1])
    y = Atom(names[2]) if len(names) == 3 else Not(x)
    lhs, rhs = _distributive_sides(z, x, y)
    left = valuate_super(v, bind(lhs, b), tol)
    right = valuate_super(v, bind(rhs, b), tol)
    ls, rs = left.status, right.status
    if ls.kind is Kind.NO_VALUE or rs.kind is Kind.NO_VALUE:
        verdict = MEANINGLESS
    elif ls == rs:
        verdict = EQUIVALENT
    else:
        verdict = NOT_EQUIVALENT
    ident = None
    if left.operator is not None and right.operator is not None:
        same = max_abs(left.operator.entries - right.operator.entries) <= tol.alg
        ident = "both sides compile to the same operator" if same else "sides compile to different operators"
    return LawReport(law, names, (left, right), verdict == EQUIVALENT, verdict, ident)
