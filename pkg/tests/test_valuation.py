import numpy as np
import pytest

from qsv.errors import QsvError, UnboundAtoms
from qsv.hilbert import make_state, member, split_bases, validate_projector
from qsv.logic import bind, make_binding, parse
from qsv.sampling import random_commuting, random_formula, random_projector, random_state
from qsv.spin import builtin_projector, builtin_state
from qsv.valuation import (
    MEANINGLESS,
    Kind,
    Law,
    TruthStatus,
    Undefined,
    block_membership_status,
    check_law,
    valuate,
    valuate_bivalent,
    valuate_bivalent_formula,
    valuate_degree,
    valuate_super,
)


def _super(text, v, b):
    return valuate_super(v, bind(parse(text), b)).status


# -----------------------------
# statuses
# -----------------------------
def test_truth_status_constructors():
    assert TruthStatus.from_bool(True) == TruthStatus.true()
    assert TruthStatus.of_degree(0.25).label() == "degree 0.25"
    assert TruthStatus.gap().to_dict() == {"kind": "gap"}
    assert not TruthStatus.no_value().is_definite()
    with pytest.raises(QsvError):
        TruthStatus.gap().to_bool()


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_degree_must_lie_in_unit_interval(bad):
    with pytest.raises(QsvError):
        TruthStatus.of_degree(bad)


def test_only_degree_carries_a_number():
    with pytest.raises(QsvError):
        TruthStatus(Kind.TRUE, 0.5)


# -----------------------------
# bivalent
# -----------------------------
def test_bivalent_atoms(z_up):
    assert valuate_bivalent(z_up, builtin_projector("z+")) == TruthStatus.true()
    assert valuate_bivalent(z_up, builtin_projector("z-")) == TruthStatus.false()
    s = valuate_bivalent(z_up, builtin_projector("x+"))
    assert isinstance(s, Undefined)
    assert s.range_residual == pytest.approx(np.sqrt(0.5))
    assert s.kernel_residual == pytest.approx(np.sqrt(0.5))


def test_bivalent_formula_is_truth_functional(z_up, spin_binding):
    r = valuate_bivalent_formula(z_up, bind(parse("Z+ & ~Z-"), spin_binding))
    assert r.status == TruthStatus.true()
    r = valuate_bivalent_formula(z_up, bind(parse("X+ | ~X+"), spin_binding))
    assert isinstance(r.status, Undefined)
    assert r.status.atom == "X+"


def test_super_agrees_with_bivalent_on_atoms(rng):
    for _ in range(300):
        dim = int(rng.integers(2, 5))
        p = random_projector(dim, rng)
        # mix random states with exact range / kernel vectors
        pick = int(rng.integers(3))
        v = random_state(dim, rng)
        if pick:
            m = p.entries if pick == 1 else np.eye(dim) - p.entries
            v = make_state(m @ v.amplitudes, normalize=True)
        sup = valuate_super(v, bind(parse("a"), make_binding({"a": p}))).status
        biv = valuate_bivalent(v, p)
        ran, ker = split_bases(p)
        if member(v, ran) or member(v, ker):
            assert sup.is_definite()
            assert sup == biv
        else:
            assert sup.kind is Kind.GAP
            assert isinstance(biv, Undefined)


# -----------------------------
# worked spin-1/2 valuations
# -----------------------------
def test_worked_valuations(z_up, spin_binding):
    biv = lambda t: valuate_bivalent_formula(z_up, bind(parse(t), spin_binding)).status
    assert biv("Z+") == TruthStatus.true()
    assert biv("Z-") == TruthStatus.false()
    assert _super("X+", z_up, spin_binding) == TruthStatus.gap()
    assert _super("X-", z_up, spin_binding) == TruthStatus.gap()
    assert _super("X+ ^ X-", z_up, spin_binding) == TruthStatus.true()
    assert _super("X+ & ~X+", z_up, spin_binding) == TruthStatus.false()
    assert _super("Z+ & (X+ | ~X+)", z_up, spin_binding) == TruthStatus.true()
    assert _super("(Z+ & X+) | (Z+ & ~X+)", z_up, spin_binding) == TruthStatus.no_value()


def test_disjunction_true_with_both_disjuncts_gapped(z_up, spin_binding):
    assert _super("X+", z_up, spin_binding).kind is Kind.GAP
    assert _super("X-", z_up, spin_binding).kind is Kind.GAP
    assert _super("X+ | X-", z_up, spin_binding) == TruthStatus.true()
    assert _super("X+ | ~X+", z_up, spin_binding) == TruthStatus.true()


def test_cross_context_with_definite_operands(z_up, spin_binding):
    # both operands definite, so the classical table applies
    assert _super("Z+ & (X+ ^ X-)", z_up, spin_binding) == TruthStatus.true()
    assert _super("Z- | (X+ & X-)", z_up, spin_binding) == TruthStatus.false()
    assert _super("Z+ ^ (X+ | X-)", z_up, spin_binding) == TruthStatus.false()
    assert _super("~(Z+ & X+)", z_up, spin_binding) == TruthStatus.no_value()


def test_trace_covers_every_subformula(z_up, spin_binding):
    r = valuate_super(z_up, bind(parse("Z+ & (X+ | ~X+)"), spin_binding))
    assert [t.subformula for t in r.trace] == ["Z+", "X+", "X+", "~X+", "X+ | ~X+", "Z+ & (X+ | ~X+)"]
    assert "across contexts" in r.trace[-1].justification
    assert r.trace[4].justification == "operator is 1: true in every state"
    assert r.operator is None


# -----------------------------
# degree
# -----------------------------
def test_degree_examples(z_up, spin_binding):
    deg = lambda t: valuate_degree(z_up, bind(parse(t), spin_binding)).status
    assert deg("X+").degree == pytest.approx(0.5, abs=1e-9)
    assert deg("X+ ^ X-").degree == pytest.approx(1.0)
    assert deg("Z-").degree == pytest.approx(0.0)
    assert deg("Z+ & X+") == TruthStatus.no_value()


def test_degrees_of_an_orthogonal_pair_sum_to_one(rng, spin_binding):
    for up, down in (("Z+", "Z-"), ("X+", "X-"), ("Y+", "Y-")):
        for _ in range(100):
            v = random_state(2, rng)
            r1 = valuate_degree(v, bind(parse(up), spin_binding)).status.degree
            r2 = valuate_degree(v, bind(parse(down), spin_binding)).status.degree
            assert r1 + r2 == pytest.approx(1.0, abs=1e-9)


def test_degree_agrees_with_super(rng, tol):
    names = ["a", "b"]
    for k in range(200):
        dim = 2 + k % 3
        bnd = make_binding(dict(zip(names, random_commuting(dim, 2, rng, tol))))
        bf = bind(random_formula(names, 3, rng), bnd)
        v = random_state(dim, rng)
        if k % 2:
            op = valuate_degree(v, bf, tol).operator
            if not op.is_zero():
                v = make_state(op.entries @ v.amplitudes, tol, normalize=True)
        sup = valuate_super(v, bf, tol).status
        deg = valuate_degree(v, bf, tol).status.degree
        if sup.kind is Kind.TRUE:
            assert deg >= 1 - tol.member
        elif sup.kind is Kind.FALSE:
            assert deg <= tol.member


# -----------------------------
# oracle agreement
# -----------------------------
def test_super_matches_block_membership(rng, tol):
    names = ["a", "b", "c"]
    for k in range(500):
        dim = 2 + k % 3
        bnd = make_binding(dict(zip(names, random_commuting(dim, 3, rng, tol))))
        bf = bind(random_formula(names, int(rng.integers(1, 7)), rng), bnd)
        v = random_state(dim, rng)
        if k % 3 == 0:
            # land inside one joint block so definite answers show up too
            p = bnd["a"].entries if k % 2 else np.eye(dim) - bnd["a"].entries
            v = make_state(p @ v.amplitudes, tol, normalize=True)
        assert valuate_super(v, bf, tol).status == block_membership_status(v, bf, tol)


def test_block_membership_is_none_across_contexts(z_up, spin_binding):
    assert block_membership_status(z_up, bind(parse("Z+ & X+"), spin_binding)) is None


def test_valuate_dispatch(z_up, spin_binding):
    bf = bind(parse("X+"), spin_binding)
    assert valuate("super", z_up, bf).semantics == "super"
    assert valuate("degree", z_up, bf).status.kind is Kind.DEGREE
    with pytest.raises(QsvError):
        valuate("fuzzy", z_up, bf)


# -----------------------------
# laws
# -----------------------------
def test_law_examples(z_up, spin_binding):
    em = check_law(Law.EXCLUDED_MIDDLE, z_up, spin_binding, ["X+"])
    assert em.holds and em.verdict == "valid"
    assert em.statuses == (TruthStatus.true(),)
    assert em.operator_identity == "X+ join (1 - X+) = 1"

    nc = check_law("non-contradiction", z_up, spin_binding, ["X+"])
    assert nc.holds
    assert nc.statuses == (TruthStatus.false(),)

    dist = check_law(Law.DISTRIBUTIVITY, z_up, spin_binding, ["Z+", "X+"])
    assert dist.statuses == (TruthStatus.true(), TruthStatus.no_value())
    assert dist.verdict == MEANINGLESS
    assert not dist.holds
    assert dist.to_dict()["sides"][0]["formula"] == "Z+ & (X+ | ~X+)"


def test_distributivity_inside_one_context(spin_binding):
    v = builtin_state("x+")
    dist = check_law(Law.DISTRIBUTIVITY, v, spin_binding, ["X+", "X-", "X+"])
    assert dist.verdict == "equivalent"
    assert dist.operator_identity == "both sides compile to the same operator"


def test_law_arguments(z_up, spin_binding):
    with pytest.raises(QsvError):
        check_law(Law.EXCLUDED_MIDDLE, z_up, spin_binding, ["X+", "Z+"])
    with pytest.raises(UnboundAtoms):
        check_law(Law.EXCLUDED_MIDDLE, z_up, spin_binding, ["Q"])


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_excluded_middle_and_non_contradiction_never_fail(dim, tol):
    rng = np.random.default_rng([7, dim])
    for _ in range(1000):
        p = random_projector(dim, rng, tol)
        v = random_state(dim, rng, tol)
        b = make_binding({"a": p})
        em = check_law(Law.EXCLUDED_MIDDLE, v, b, ["a"], tol)
        nc = check_law(Law.NON_CONTRADICTION, v, b, ["a"], tol)
        assert em.statuses == (TruthStatus.true(),)
        assert nc.statuses == (TruthStatus.false(),)


def test_near_projector_atom_valuates(z_up, tol):
    bnd = make_binding({"a": validate_projector(np.diag([1 - 0.9e-10, 0]), tol)})
    assert _super("a & a", z_up, bnd) == TruthStatus.true()
    assert _super("a ^ a", z_up, bnd) == TruthStatus.false()
    assert _super("(a | ~a) & a", z_up, bnd) == TruthStatus.true()
    assert valuate_degree(z_up, bind(parse("a & a"), bnd), tol).status.degree == pytest.approx(1.0)
