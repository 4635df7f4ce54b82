"""
Formula language.

    formula := xor_expr (('|' | OR) xor_expr)*
    xor_expr := and_expr (('^' | XOR) and_expr)*
    and_expr := unary (('&' | AND) unary)*
    unary    := ('~' | '!') unary | primary
    primary  := ATOM | '(' formula ')'
    ATOM     := [A-Za-z_][A-Za-z0-9_+-]*

Keywords are case-insensitive, so AND / OR / XOR cannot be atom names.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import BindingFileError, DimensionMismatch, FormulaSyntaxError, QsvError, UnboundAtoms
from .hilbert import Projector, snap_projector, validate_projector
from .lattice import common_eigenspaces, commutes, complement, join, meet, xjoin
from .spin import builtin_projector

MAX_DEPTH = 64
MAX_INPUT_BYTES = 64 * 1024


# -----------------------------
# AST
# -----------------------------
@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Xor:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Xor]
Binary = (And, Or, Xor)

SYMBOL = {And: "&", Xor: "^", Or: "|"}
PRECEDENCE = {Or: 1, Xor: 2, And: 3}


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Not):
        return (f.operand,)
    return (f.left, f.right)


def subformulas(f: Formula) -> List[Formula]:
    """Post-order, duplicates kept."""
    out: List[Formula] = []
    stack: List[Tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        stack.append((node, True))
        for c in reversed(children(node)):
            stack.append((c, False))
    return out


def atoms(f: Formula) -> List[str]:
    """Atom names in first-occurrence order."""
    seen: Dict[str, None] = {}
    for node in subformulas(f):
        if isinstance(node, Atom):
            seen.setdefault(node.name, None)
    return list(seen)


def depth(f: Formula) -> int:
    d: Dict[int, int] = {}
    for node in subformulas(f):
        d[id(node)] = 1 + max((d[id(c)] for c in children(node)), default=0)
    return d[id(f)]


def render(f: Formula) -> str:
    """Minimal-parenthesis printer; parse(render(f)) == f."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        inner = render(f.operand)
        return "~" + (inner if isinstance(f.operand, (Atom, Not)) else f"({inner})")

    prec = PRECEDENCE[type(f)]
    left, right = render(f.left), render(f.right)
    if isinstance(f.left, Binary) and PRECEDENCE[type(f.left)] < prec:
        left = f"({left})"
    # left-associative: an equal-precedence right child needs parentheses
    if isinstance(f.right, Binary) and PRECEDENCE[type(f.right)] <= prec:
        right = f"({right})"
    return f"{left} {SYMBOL[type(f)]} {right}"


def evaluate_classical(f: Formula, assignment: Mapping[str, Union[int, bool]]) -> bool:
    if isinstance(f, Atom):
        return bool(assignment[f.name])
    if isinstance(f, Not):
        return not evaluate_classical(f.operand, assignment)
    a = evaluate_classical(f.left, assignment)
    b = evaluate_classical(f.right, assignment)
    if isinstance(f, And):
        return a and b
    if isinstance(f, Or):
        return a or b
    return a != b


# -----------------------------
# Tokenizer / parser
# -----------------------------
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<ident>[A-Za-z_][A-Za-z0-9_+\-]*)|(?P<op>[~!&^|()])"
)
_KEYWORDS = {"AND": "&", "OR": "|", "XOR": "^"}
_OP_NAMES = {"~": "~", "!": "~"}

EXPECT_OPERAND = ("atom", "(", "~")
EXPECT_OPERATOR = ("&", "^", "|", "end of input")


@dataclass(frozen=True)
class Token:
    kind: str  # "atom" | "op" | "eof"
    value: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col,
                                     EXPECT_OPERAND + EXPECT_OPERATOR[:-1] + (")",))
        if m.lastgroup == "ident":
            word = m.group()
            if word.upper() in _KEYWORDS:
                tokens.append(Token("op", _KEYWORDS[word.upper()], line, col))
            else:
                tokens.append(Token("atom", word, line, col))
        elif m.lastgroup == "op":
            tokens.append(Token("op", _OP_NAMES.get(m.group(), m.group()), line, col))
        else:
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    LEVELS = (("|", Or), ("^", Xor), ("&", And))

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: Token, expected) -> None:
        what = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise FormulaSyntaxError(f"unexpected {what}", tok.line, tok.column, expected)

    @staticmethod
    def check_depth(d: int, tok: Token) -> None:
        if d > MAX_DEPTH:
            raise FormulaSyntaxError(f"formula nests deeper than {MAX_DEPTH}", tok.line, tok.column)

    def binary(self, level: int, nesting: int) -> Tuple[Formula, int]:
        if level == len(self.LEVELS):
            return self.unary(nesting)
        symbol, cls = self.LEVELS[level]
        left, d = self.binary(level + 1, nesting)
        while self.peek().kind == "op" and self.peek().value == symbol:
            tok = self.advance()
            right, rd = self.binary(level + 1, nesting)
            left, d = cls(left, right), 1 + max(d, rd)
            self.check_depth(d, tok)
        return left, d

    def unary(self, nesting: int) -> Tuple[Formula, int]:
        tok = self.peek()
        if tok.kind == "op" and tok.value == "~":
            self.advance()
            self.check_depth(nesting + 1, tok)
            inner, d = self.unary(nesting + 1)
            self.check_depth(d + 1, tok)
            return Not(inner), d + 1
        if tok.kind == "op" and tok.value == "(":
            self.advance()
            self.check_depth(nesting + 1, tok)
            inner, d = self.binary(0, nesting + 1)
            close = self.peek()
            if not (close.kind == "op" and close.value == ")"):
                self.fail(close, ("&", "^", "|", ")"))
            self.advance()
            return inner, d
        if tok.kind == "atom":
            self.advance()
            return Atom(tok.value), 1
        self.fail(tok, EXPECT_OPERAND)

    def parse(self) -> Formula:
        f, _ = self.binary(0, 0)
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(tok, EXPECT_OPERATOR)
        return f


def parse(text: str) -> Formula:
    if len(text.encode("utf-8")) > MAX_INPUT_BYTES:
        raise FormulaSyntaxError(f"formula text exceeds {MAX_INPUT_BYTES} bytes", 1, 1)
    return _Parser(tokenize(text)).parse()


# -----------------------------
# Binding
# -----------------------------
@dataclass(frozen=True, eq=False)
class Binding:
    ambient_dim: int
    atoms: Mapping[str, Projector]

    def __contains__(self, name: str) -> bool:
        return name in self.atoms

    def __getitem__(self, name: str) -> Projector:
        return self.atoms[name]


@dataclass(frozen=True, eq=False)
class BoundFormula:
    formula: Formula
    binding: Binding

    def projector(self, name: str) -> Projector:
        return self.binding.atoms[name]

    def text(self) -> str:
        return render(self.formula)


def make_binding(mapping: Mapping[str, Projector]) -> Binding:
    if not mapping:
        raise BindingFileError("binding has no atoms")
    dims = {p.dim for p in mapping.values()}
    if len(dims) != 1:
        first = next(iter(mapping.values())).dim
        odd = next(p.dim for p in mapping.values() if p.dim != first)
        raise DimensionMismatch(first, odd, "binding atom")
    return Binding(dims.pop(), MappingProxyType(dict(mapping)))


def bind(f: Formula, b: Binding) -> BoundFormula:
    missing = [name for name in atoms(f) if name not in b.atoms]
    if missing:
        raise UnboundAtoms(missing)
    return BoundFormula(f, b)


def parse_entry(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise BindingFileError(f"{where}: expected a number or [re, im], got {x!r}")


def parse_matrix(rows, where: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise BindingFileError(f"{where}: expected a list of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise BindingFileError(f"{where}: matrix must be square ({n} rows)")
    return np.array([[parse_entry(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)]
                     for i, r in enumerate(rows)], dtype=np.complex128)


def binding_from_dict(doc: Mapping, tol: Tolerances = DEFAULT_TOL) -> Binding:
    if not isinstance(doc, Mapping) or "atoms" not in doc or not isinstance(doc["atoms"], Mapping):
        raise BindingFileError('binding must be an object with an "atoms" object')
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise BindingFileError(f'"dim" must be a positive integer, got {dim!r}')

    out: Dict[str, Projector] = {}
    for name, entry in doc["atoms"].items():
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_+\-]*", name) or name.upper() in _KEYWORDS:
            raise BindingFileError(f"invalid atom name {name!r}")
        if not isinstance(entry, Mapping):
            raise BindingFileError(f"atom {name!r}: expected an object")
        if "builtin" in entry:
            p = builtin_projector(str(entry["builtin"]), tol)
        elif "matrix" in entry:
            try:
                p = validate_projector(parse_matrix(entry["matrix"], f"atom {name!r}"), tol)
            except QsvError as e:
                if isinstance(e, BindingFileError):
                    raise
                raise BindingFileError(f"atom {name!r}: {e}") from e
        else:
            raise BindingFileError(f'atom {name!r}: needs "matrix" or "builtin"')
        if p.dim != dim:
            raise BindingFileError(f"atom {name!r}: dimension {p.dim} != declared dim {dim}")
        out[name] = p
    return make_binding(out)


def load_binding(path: Union[str, Path], tol: Tolerances = DEFAULT_TOL) -> Binding:
    # OSError / JSONDecodeError propagate; the CLI maps them to the I/O exit code
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    return binding_from_dict(doc, tol)


# -----------------------------
# Compilation
# -----------------------------
@dataclass(frozen=True)
class CrossContext:
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} and {self.right} lie in different contexts"


def first_noncommuting(names: List[str], b: Binding, tol: Tolerances = DEFAULT_TOL) -> Optional[CrossContext]:
    for i, a in enumerate(names):
        for c in names[i + 1:]:
            if not commutes(b.atoms[a], b.atoms[c], tol):
                return CrossContext(a, c)
    return None


def compile_node(f: Formula, b: Binding, tol: Tolerances = DEFAULT_TOL,
                 memo: Optional[Dict[int, Projector]] = None) -> Projector:
    """Connective-by-connective compilation; atoms must already commute."""
    memo = {} if memo is None else memo
    for node in subformulas(f):
        key = id(node)
        if key in memo:
            continue
        if isinstance(node, Atom):
            memo[key] = b.atoms[node.name]
        elif isinstance(node, Not):
            memo[key] = complement(memo[id(node.operand)])
        else:
            l, r = memo[id(node.left)], memo[id(node.right)]
            op = meet if isinstance(node, And) else join if isinstance(node, Or) else xjoin
            memo[key] = op(l, r, tol, False)
    return memo[id(f)]


def compile_formula(bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> Union[Projector, CrossContext]:
    cross = first_noncommuting(atoms(bf.formula), bf.binding, tol)
    if cross is not None:
        return cross
    return compile_node(bf.formula, bf.binding, tol)


def precisification_projector(bf: BoundFormula, tol: Tolerances = DEFAULT_TOL) -> Union[Projector, CrossContext]:
    """
    Sum of the joint-eigenspace blocks on which the formula is classically
    true. Agrees with compile_formula on single-context formulas.
    """
    names = atoms(bf.formula)
    cross = first_noncommuting(names, bf.binding, tol)
    if cross is not None:
        return cross
    es = common_eigenspaces([(n, bf.binding.atoms[n]) for n in names], bf.binding.ambient_dim, tol)
    dim = bf.binding.ambient_dim
    total = np.zeros((dim, dim), dtype=np.complex128)
    for blk in es.blocks:
        if evaluate_classical(bf.formula, blk.assignment):
            total = total + blk.subspace.projector_matrix()
    return snap_projector(total, tol)

