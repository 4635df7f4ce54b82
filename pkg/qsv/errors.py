from __future__ import annotations

from typing import Iterable, Optional, Sequence

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_LAW = 4


class QsvError(RuntimeError):
    exit_code = EXIT_NUMERIC


# ---------- input errors ----------
class ConfigError(QsvError):
    exit_code = EXIT_INPUT


class InvalidState(QsvError):
    exit_code = EXIT_INPUT


class InvalidContext(QsvError):
    exit_code = EXIT_INPUT


class BindingFileError(QsvError):
    exit_code = EXIT_INPUT


class TrivialMember(QsvError):
    exit_code = EXIT_INPUT

    def __init__(self, label: str, which: str):
        self.label = label
        self.which = which
        super().__init__(f"context member {label!r} is the trivial projector {which}")


class UnboundAtoms(QsvError):
    exit_code = EXIT_INPUT

    def __init__(self, names: Iterable[str]):
        self.names = list(names)
        super().__init__("unbound atoms: " + ", ".join(self.names))


class FormulaSyntaxError(QsvError):
    exit_code = EXIT_INPUT

    def __init__(self, message: str, line: int, column: int, expected: Sequence[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.detail = message
        text = f"{message} at line {line}, column {column}"
        if self.expected:
            text += " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(text)


# ---------- numeric errors ----------
class NotHermitian(QsvError):
    def __init__(self, residual: float, eps: float):
        self.residual = residual
        super().__init__(f"matrix is not Hermitian: max|M - M^H| = {residual:.3e} > {eps:.1e}")


class NotIdempotent(QsvError):
    def __init__(self, residual: float, eps: float):
        self.residual = residual
        super().__init__(f"matrix is not idempotent: max|M^2 - M| = {residual:.3e} > {eps:.1e}")


class DimensionMismatch(QsvError):
    def __init__(self, expected: int, got: int, what: str = "operand"):
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch for {what}: expected {expected}, got {got}")


class DimensionTooLarge(QsvError):
    def __init__(self, dim: int, cap: int):
        super().__init__(f"dimension {dim} exceeds the configured cap {cap}")


class DecompositionFailure(QsvError):
    pass


class NonCommuting(QsvError):
    def __init__(self, left: str, right: str, residual: Optional[float] = None):
        self.left = left
        self.right = right
        self.residual = residual
        msg = f"{left} and {right} do not commute"
        if residual is not None:
            msg += f" (max|[P, Q]| = {residual:.3e})"
        super().__init__(msg)

