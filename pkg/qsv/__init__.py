"""Supervaluation over lattices of commuting projectors."""
from .config import DEFAULT_TOL, Tolerances
from .errors import QsvError
from .hilbert import Projector, StateVector, make_state, validate_projector
from .logic import bind, compile_formula, make_binding, parse
from .valuation import TruthStatus, check_law, valuate

__all__ = [
    "DEFAULT_TOL",
    "Projector",
    "QsvError",
    "StateVector",
    "Tolerances",
    "TruthStatus",
    "bind",
    "check_law",
    "compile_formula",
    "make_binding",
    "make_state",
    "parse",
    "valuate",
    "validate_projector",
]
